"""Smoke test for the ptvertex extension module.

Build first:  pip install --no-build-isolation -e crates/py
Run:          python3 python/smoke_test.py
"""

from fractions import Fraction

import ptvertex as pt


def frac(pair):
    return Fraction(int(pair[0]), int(pair[1]))


def main():
    one = pt.Partition([1])
    assert str(one) == "(1)"
    assert [str(p) for p in pt.Partition.all_of_size(3)] == ["(3)", "(2,1)", "(1,1,1)"]

    # specialized vertex of a single box
    s, top = pt.specialize(one, 1, 8)
    assert [(n, str(c)) for n, c in s.terms() if not c.is_zero()] == [(1, "1"), (2, "1")]
    assert top == 2
    s, _ = pt.specialize(one, 2, 8)
    assert [(n, str(c)) for n, c in s.terms() if not c.is_zero()] == [(1, "1"), (2, "2"), (3, "1")]

    # every enumerated configuration passes the independent check
    mu = pt.Partition([2, 1])
    for length in range(4):
        for depths in pt.box_configs(mu, length):
            assert pt.validate_config(mu, depths)

    assert pt.count_nonvanishing_permutations([0, 1, 1]) == (2, 2)

    s1s2 = pt.RationalFunction("s1*s2")
    for c, want in [(1, Fraction(1)), (2, Fraction(1, 2)), (3, Fraction(1, 6))]:
        v = pt.hilb_descendent_pairing([c - 1], pt.Partition([c])) * s1s2
        assert frac(v.eval([(1, 1), (1, 1), (0, 1)])) == want

    for d in (1, 2):
        for a in pt.Partition.all_of_size(d):
            for b in pt.Partition.all_of_size(d):
                assert pt.nakajima_pairing(a, b) == pt.nakajima_pairing_closed_form(a, b)

    ref = pt.stationary_reference_series(2)
    fitted = pt.fit_rational(ref.expand(13), 2)
    assert fitted.same_function(ref)
    assert fitted.functional_equation_check(4, 2, 1, 2)
    assert pt.RationalQ.from_json(fitted.to_json()).same_function(ref)

    try:
        pt.count_nonvanishing_permutations([0, 2])
    except ValueError:
        pass
    else:
        raise AssertionError("invalid sequence accepted")

    code, out, _ = pt.run_cli(["vertex", "--mu", "1", "--a", "1", "--qmax", "8"])
    assert code == 0 and out.strip().endswith("q + q^2, tail vanishes"), out
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
