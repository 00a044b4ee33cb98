"""Chains that link an ab-free sequence back to the empty sequence."""
from gossipck import abab_witness, parse_sequence

for n, text in [(8, "ah;cd;bc;bd;be;ad;bf;bg;af"), (4, "bc;bd;ac;bc;ac")]:
    chain = abab_witness(parse_sequence(text, n), 0, 1, n)
    print(f"[{chain.construction}]", chain.render(n))
