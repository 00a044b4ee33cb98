"""Knowledge after a few calls between three agents."""
from gossipck import parse_formula, parse_sequence, view
from gossipck.modelcheck import eval, eval_bounded_converged
from gossipck.pairview import epv

C = parse_sequence("ac;bc;ac", 3)
print("a's view:", view(C, 0, 3))

for text in ["Ka Fc A", "C{a,b} Fc A"]:
    print(f"{text:14s}", eval(parse_formula(text), C, 3))

# nested knowledge of different agents lies outside the exact fragment,
# so grow the bounded universe until the answer stops changing
value, L = eval_bounded_converged(parse_formula("Ka Kb Ka Fc A"), C, 3)
print(f"{'Ka Kb Ka Fc A':14s}", value, f"(stable from length {L})")

V = epv(C, 3)
for pair in [(0, 1), (0, 2), (1, 2)]:
    print("slot", "abc"[pair[0]] + "abc"[pair[1]], sorted(str(s) for s in V[pair]))
