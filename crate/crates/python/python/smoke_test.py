"""Smoke test for the compiled extension: build a square root and check it."""

import math

import toeplitz_roots_py as tr


def main():
    terms = [(1.0, 1.0, 0), (1.0, 2.0, 0)]
    root = tr.construct_root(2, terms=terms)
    assert root.passed, root
    assert root.max_residual <= 1e-6
    assert len(root.nodes) == len(root.psi) == 256

    # 4 psi(3) * 6 psi(5) = 6 phi(4) = 11/5
    k0 = 24 * root.mellin(3.0) * root.mellin(5.0)
    assert abs(k0 - 2.2) < 1e-12, k0
    assert abs(root.mellin(5.0, "numeric") - root.mellin(5.0)) < 1e-9

    assert abs(root.psi_at(0.5).real - 0.816527949862799) < 1e-9
    assert abs(tr.mellin(terms, 4.0) - 11.0 / 30.0) < 1e-15

    nodes, values = tr.convolve([(1.0, 1.0), (1.0, 1.0)])
    r, v = nodes[128], values[128]
    assert abs(v + r * math.log(r)) < 1e-12

    try:
        tr.construct_root(2, rational=(1.0, [1.0], [2.0]))
    except tr.RootError as e:
        assert e.args[0] == "properness", e.args
    else:
        raise AssertionError("improper symbol accepted")
    print("smoke test passed:", root)


if __name__ == "__main__":
    main()
