"""Smoke test for the clonelab_py extension.

Build first:
    cargo build -p clonelab-py --release
    cp target/release/libclonelab_py.so python/clonelab_py.so
"""
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import clonelab_py as cl


def main():
    p = cl.Profile.parse("4 3\nnames: a,b,c,d\na,b,c,d\nb,d,c,a\na,b,d,c\n")
    assert (p.m, p.n) == (4, 3)
    sets = sorted(p.clone_sets(), key=lambda s: (len(s), s))
    assert sets == [[0], [1], [2], [3], [2, 3], [1, 2, 3], [0, 1, 2, 3]], sets
    assert p.is_clone([2, 3]) and not p.is_clone([0, 1])
    print("tree:", p.pq_tree())

    ring = [[0], [1], [2], [3], [0, 1], [1, 2], [2, 3], [0, 3], [0, 1, 2, 3]]
    assert "A5" in cl.violated_axioms(4, ring)
    assert cl.violated_axioms(3, [[0], [1], [2], [0, 1], [0, 1, 2]]) == []

    fam = [[0], [1], [2], [3], [4], [1, 2], [1, 2, 3], [0, 1, 2, 3, 4]]
    for flavor in ("minimal", "single-crossing", "single-peaked"):
        q = cl.implement(5, fam, flavor)
        assert sorted(q.clone_sets()) == sorted(fam), (flavor, q.clone_sets())
    assert cl.implement(5, fam, "single-crossing").single_crossing_order() is not None

    s = cl.Profile([[0, 1, 2], [2, 1, 0]])
    assert s.single_peaked_axis() is not None
    cyc = cl.Profile([[0, 1, 2], [1, 2, 0], [2, 0, 1]])
    assert cyc.single_peaked_axis() is None
    q, mapping = cyc.declone_single_peaked()
    assert q.single_peaked_axis() is not None
    print("condorcet cycle declones to", q.m, "candidates via", mapping)

    q, _ = cyc.declone_single_crossing()
    assert q.single_crossing_order() is not None
    assert cyc.declone_single_crossing_exact(1) is not None

    red, target = cl.x3c_reduction(1, [[0, 1, 2]] * 4)
    print("x3c reduction:", red, "target", target)

    try:
        cl.Profile([[0, 1], [0, 0]])
    except ValueError as e:
        print("rejected bad profile:", e)
    else:
        raise AssertionError("bad profile accepted")
    print("ok")


if __name__ == "__main__":
    main()
