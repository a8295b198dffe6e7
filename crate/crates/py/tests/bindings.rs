use pyo3::prelude::*;
use tnl::tnl as tnl_module;

#[test]
fn module_runs_in_embedded_interpreter() {
    pyo3::append_to_inittab!(tnl_module);
    Python::initialize();
    Python::attach(|py| {
        py.run(
            cr#"
import math, json, tnl
e2 = tnl.Space.euclidean(2)
ident = tnl.Operator.identity(e2)
assert abs(ident.pi2().upper - math.sqrt(2)) < 1e-9
g = ident.gamma2_star()
assert abs(g.lower - 2) < 1e-5 and abs(g.upper - 2) < 1e-5
phi = tnl.Operator(tnl.Space.linf(2), tnl.Space.l1(2), [[0.5, 0.5], [0.5, -0.5]])
assert phi.matrix == [[0.5, 0.5], [0.5, -0.5]]
assert abs(phi.gamma2().lower - math.sqrt(2)) < 1e-5
z = tnl.Tensor.gaussian(e2, 2, seed=1)
assert z.shape == [2, 2]
assert z.hilbert_norm() ** 2 <= z.injective_norm().upper * z.projective_norm().upper + 1e-9
rec = json.loads(tnl.run_experiment('{"scenario": "hfp-nonstrict"}'))
assert rec["passed"]
try:
    tnl.Operator(e2, e2, [[1.0, 2.0]])
    raise SystemExit("shape mismatch accepted")
except ValueError:
    pass
"#,
            None,
            None,
        )
        .unwrap();
    });
}
