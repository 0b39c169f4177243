"""Smoke test for the rand_acim_py extension module."""

import math

import rand_acim_py as ra


def main():
    t = ra.PiecewiseMap.example_family(0.0)
    assert t.branch_count == 3
    passed, min_slope, _, failures = t.validate()
    assert passed and min_slope >= 2.0, failures

    d = ra.PiecewiseMap.doubling()
    m = ra.ulam_matrix(d, 2)
    assert all(abs(v - 0.5) < 1e-15 for row in m.to_dense() for v in row)
    assert m.apply([1.0, 1.0]) == [1.0, 1.0]

    assert abs(ra.d_ly(t.translated(1e-3), t) - 1e-3) < 1e-6

    a = ra.galerkin_matrix(ra.PiecewiseMap.identity(), 2)
    assert abs(a[2][2][0] - 1.0) < 1e-12

    n = 1024
    f = [math.sin(2 * math.pi * (l + 0.5) / n) for l in range(n)]
    h = ra.hpt_norm(f)
    assert abs(ra.hpt_norm([2 * x for x in f]) - 2 * h) < 1e-10 * h
    assert ra.conditional_expectation([1.0] * 12, 3) == [1.0, 1.0, 1.0]

    out = ra.push_forward(k=200, q=50, steps=3, record=[3])
    dens = out[3]
    assert len(dens) == 200
    assert abs(sum(v for _, v in dens) / 200 - 1.0) < 1e-8
    assert min(v for _, v in dens) >= 0.0

    l1, l2 = ra.lyapunov(family="doubling", k=64, n=100, trials=5)
    assert abs(l1) < 1e-12 and l2 <= math.log(0.5) + 0.1

    try:
        ra.ulam_matrix(d, 0)
    except ValueError:
        pass
    else:
        raise AssertionError("k = 0 accepted")
    print("smoke test passed")


if __name__ == "__main__":
    main()
