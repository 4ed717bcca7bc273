# Pauli strings as bitmasks: products, weights and the integer index.
from pauliprop.pauli import PauliString, commutes, index_decode, index_encode, multiply, weight

p = PauliString.from_label("XZYI")  # qubit 1 is the leftmost letter
q = PauliString.from_label("ZZII")
print(p, "x_mask =", bin(p.x_mask), "z_mask =", bin(p.z_mask))

phase, r = multiply(p, q)
print(f"{p} * {q} = {phase} * {r}")
print("commute?", commutes(p, q))

# weight counts X and Y letters; it sets the dephasing rate of a string
print("weight of", p, "=", weight(p))

# every string has an index in [0, 4^N); the identity is 0
k = index_encode(p)
print("index", k, "decodes back to", index_decode(k, 4))
