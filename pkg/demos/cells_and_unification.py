"""Walk through the cell encoding and the unifier on small inputs.

    python demos/cells_and_unification.py
"""

from exprindex.expr_core import Arena, CellRef, VarNames, cell_table, parse, render, variables
from exprindex.substitution import apply_destructive, materialize, render_substitution
from exprindex.unify import UnifyStats, unify


def show(e):
    for index, tag, payload in cell_table(e):
        print(f"  {index:>3}  {tag:<5}  {payload}")


# One arena, several expressions.  Only the first occurrence of a variable
# gets a NOVAR cell; later ones point back to it by offset.
arena = Arena()
e = parse("f(a, X, g(b), Y, Y)", arena)
print("cells of", render(e))
show(e)

# Binding Y writes into its NOVAR cell only.  The OFVAR cell keeps its
# offset and reaches the binding through it.
h = parse("h(a, Z)", arena)
apply_destructive(CellRef(arena, 5), h.cell)
print("\nafter binding Y:", render(e))

# Unification reads both expressions left to right and reports how they
# relate along with the unifier.
print()
stats = UnifyStats()
for left, right in [("f(X, X)", "f(a, a)"), ("f(X, b)", "f(a, Y)"),
                    ("f(X, Y)", "f(U, W)"), ("f(X, X)", "f(Y, g(Y, a))")]:
    e1, e2 = parse(left), parse(right)
    r = unify(e1, e2, stats)
    names = VarNames()
    for v in variables(e1) + variables(e2):
        names(v)
    line = f"{left:<10} ~ {right:<15} {r.mode}"
    if r.mode.name != "NU":
        unified = render(materialize(e1, r.s1, r.s2))
        line += f"  S1={render_substitution(r.s1, names)} S2={render_substitution(r.s2, names)} -> {unified}"
    print(line)
print(f"\n{stats.calls} unifications, {stats.occurs_checks} occurs checks")
