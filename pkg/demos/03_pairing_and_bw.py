"""Output pairing and the biometrically cross-weighted IQA on score grids.

Demorpher outputs are unordered, so every metric works on the 2x2 grid of
output-vs-ground-truth scores.  The cross-weighted metric multiplies each
pairing's IQA values by the biometric match scores before picking the
better pairing -- a reconstruction only scores well if it looks good AND
matches the right identity.
"""

from demorpheval import bw_iqa, paired_iqa, resolve_pairing
from demorpheval.pairing import check_demorph_conditions

print("good demorpher (outputs arrive swapped):")
b = dict(b11=0.12, b22=0.18, b12=0.91, b21=0.88)  # b_jk = B(o_j, i_k)
q = dict(q11=0.35, q22=0.30, q12=0.82, q21=0.79)  # SSIM grid
print(f"  pairing       = {resolve_pairing(b['b11'], b['b22'], b['b12'], b['b21'])}")
print(f"  paired SSIM   = {paired_iqa(q['q11'], q['q22'], q['q12'], q['q21']):.4f}")
print(f"  BW(SSIM) term = {bw_iqa(*b.values(), *q.values()):.4f}")

print("\nmorph replication (both outputs equal the morph):")
# the morph matches BOTH identities well, and IQA against both is identical
b = dict(b11=0.85, b22=0.84, b12=0.85, b21=0.84)
q = dict(q11=0.55, q22=0.52, q12=0.55, q21=0.52)
print(f"  pairing       = {resolve_pairing(b['b11'], b['b22'], b['b12'], b['b21'])}")
print(f"  paired SSIM   = {paired_iqa(q['q11'], q['q22'], q['q12'], q['q21']):.4f}")
print(f"  BW(SSIM) term = {bw_iqa(*b.values(), *q.values()):.4f}  (perfect would be ~2.0)")
dissimilar, aligned = check_demorph_conditions(
    0.999, b["b11"], b["b22"], b["b12"], b["b21"], theta=0.5, epsilon=0.3
)
print(f"  conditions    : dissimilar={dissimilar} (replication caught), aligned={aligned}")

print("\nperfect reconstruction:")
print(f"  BW(SSIM) term = {bw_iqa(1.0, 1.0, 0.2, 0.2, 1.0, 1.0, 0.3, 0.3):.4f}")
