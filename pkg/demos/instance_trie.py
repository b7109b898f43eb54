"""Build an instance trie, query it in all four modes, and remove an entry.

    python demos/instance_trie.py
"""

from exprindex.expr_core import parse, render
from exprindex.instance_trie import QueryMode, trie_new

trie = trie_new()
for text in ["f(a, b)", "g(a)", "f(X, b)", "f(X, Y)", "g(X)", "f(a, X)", "f(U, W)"]:
    print(f"insert {text:<8} {trie.insert(parse(text)).value}")

# The shape depends on the stored set only.  f(a, b) sits under the first
# sibling that generalizes it.
print()
print(trie.dump(), end="")

q = parse("f(a, Z)")
for mode in QueryMode:
    r = trie.retrieve(q, mode)
    found = ", ".join(f"{render(m.expr)} {m.mode}" for m in r.matches)
    print(f"\n{mode.value:<15} visited {r.visited}: {found}")

# Removing a node hands its descendants back to the parent.
trie.remove(parse("f(X, b)"))
print("\nafter removing f(X, b):")
print(trie.dump(), end="")
