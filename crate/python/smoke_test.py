"""Smoke test for the pyblockcube extension.

Build and install first:

    pip install --no-build-isolation ./crates/python
    python python/smoke_test.py
"""

import json

import pyblockcube as bc


def main():
    ex = bc.counterexample()
    assert ex.cells == (2, 2, 2) and ex.total_dim == 5
    assert ex.validate() == []
    report = ex.check()
    assert not report
    assert report.slice_failures == []
    assert report.cube_failures == [("phi", (0, 0, 0), (1, 1, 1))]
    try:
        ex.decompose()
    except ValueError as e:
        assert "strongly exact" in str(e)
    else:
        raise AssertionError("counterexample decomposed")

    m, truth = bc.random_block_sum((3, 3, 2), seed=7)
    m = m.basis_twist(11)
    assert m.check().overall
    d = m.decompose()
    assert d.verified and d.entries == truth
    assert m.verify(d)
    for cls, a, b, n in truth:
        assert m.counting_dim(a, b) == n

    again = bc.DecompositionReport.from_json(d.to_json())
    assert again.entries == d.entries
    assert bc.GridModule.from_json(m.to_json()) == m
    assert m.dualize().dualize() == m

    blocks = bc.enumerate_blocks((3, 3, 3))
    assert len(blocks) == 2 * 27 - 1 + 3
    cls, a, b = blocks[0]
    one = bc.block_module((3, 3, 3), a, b)
    assert one.decompose().entries == [(cls, a, b, 1)]

    p = m.perturb(3)
    assert p.validate() == []
    json.loads(p.check().to_json())

    print("pyblockcube smoke test: ok")


if __name__ == "__main__":
    main()
