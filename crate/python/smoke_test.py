"""Smoke test for the `tnl` Python extension.

Build and install first:  pip install --no-build-isolation -e crates/py
"""

import json
import math

import tnl


def close(a, b, tol=1e-5):
    return abs(a - b) <= tol * (1 + abs(b))


def main():
    e2 = tnl.Space.euclidean(2)
    assert e2.dim == 2 and close(e2.norm([3.0, 4.0]), 5.0)
    assert tnl.Space("linf:2").norm([0.5, -2.0]) == 2.0

    ident = tnl.Operator.identity(e2)
    assert close(ident.pi2().upper, math.sqrt(2))
    g = ident.gamma2_star()
    assert close(g.lower, 2.0) and close(g.upper, 2.0), g

    l1 = tnl.Space.l1(2)
    assert close(tnl.Operator.identity(l1).gamma2().upper, math.sqrt(2))

    phi = tnl.Operator(tnl.Space.linf(2), tnl.Space.l1(2), [[0.5, 0.5], [0.5, -0.5]])
    assert close(phi.operator_norm().upper, 1.0)
    assert close(phi.gamma2().lower, math.sqrt(2))

    z = tnl.Tensor([e2, e2], [1.0, 0.0, 0.0, 1.0])
    assert close(z.injective_norm().upper, 1.0)
    assert close(z.projective_norm().lower, 2.0)
    assert close(z.hilbert_norm(), math.sqrt(2))

    target, rows = tnl.regularization_report(ident, 2, "epi")
    assert close(target, 2.0) and close(rows[1]["lower"], 2.0)

    record = json.loads(tnl.run_experiment(json.dumps({"scenario": "radius", "m": 5})))
    assert record["passed"] and record["outputs"]["flags"]["strict"]

    try:
        tnl.Space("bogus:3")
    except ValueError:
        pass
    else:
        raise AssertionError("bad descriptor accepted")

    print("tnl", tnl.__version__, "smoke test ok")


if __name__ == "__main__":
    main()
