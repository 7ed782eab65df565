"""Smoke test for the pbij_py extension.

Build and install first:
    cd crates/py && maturin build --release -o dist && pip install dist/*.whl
"""

import pbij_py as p

# pairing and layout
assert p.pair_decode(p.pair_encode(3, 5)) == (3, 5)
layout = p.layout_for(4)
assert (layout["s"], layout["b1"], layout["t"]) == (13, 23, 26)

# maps compose left to right; outside the domain is None
h = p.finite_map([(5, 7), (7, 2)])
assert h(5) == 7 and h(6) is None
assert h.then(h)(5) == 2
assert h.invert()(2) == 7

# involution lemmas on a 3-cycle
c = p.cofinite_identity([(1, 2), (2, 3), (3, 1)])
r, s = p.two_involutions(c)
assert [r.then(s)(x) for x in (1, 2, 3)] == [2, 3, 1]
assert all(r(r(x)) == x for x in range(10))
assert all(chk["passed"] for chk in p.oracle(5))

# relative extension: double · a · halve = h
a = p.relative_extend(p.builtin("double"), p.builtin("halve"), h)
fag = p.builtin("double").then(a).then(p.builtin("halve"))
assert [fag(x) for x in range(10)] == [h(x) for x in range(10)]

# embedding round trip and verification
e = p.embed([{"kind": "finite", "pairs": [[5, 7], [7, 2]]}])
assert e.m == 1 and len(e.target_words[0]) == 307
report = e.verify(window=300)
assert report["passed"], report
e2 = p.Embedding.from_json(e.to_json())
assert e2.target_words == e.target_words

try:
    e.eval("target:0", 5)
except p.UnresolvedError as exc:
    print("target:0 at 5 unresolved:", str(exc)[:60])
print("smoke test passed")
