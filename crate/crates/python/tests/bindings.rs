use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run(code: &str) {
    Python::attach(|py| {
        let module = pyo3::wrap_pymodule!(rand_acim_py::rand_acim_py)(py);
        let globals = PyDict::new(py);
        globals.set_item("ra", module).unwrap();
        let code = std::ffi::CString::new(code).unwrap();
        if let Err(e) = py.run(&code, Some(&globals), None) {
            e.print(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn ulam_rows_are_stochastic() {
    run(r#"
m = ra.ulam_matrix(ra.PiecewiseMap.example_family(0.25), 64)
assert m.k == 64
for row in m.to_dense():
    assert abs(sum(row) - 1.0) < 1e-12
v = m.apply([1.0] * 64)
assert abs(sum(v) / 64 - 1.0) < 1e-12
"#);
}

#[test]
fn invalid_arguments_raise_value_error() {
    run(r#"
try:
    ra.ulam_matrix(ra.PiecewiseMap.doubling(), 0)
except ValueError:
    pass
else:
    raise AssertionError("expected ValueError")
try:
    ra.hpt_norm([1.0, 2.0], extension="mirror")
except ValueError:
    pass
else:
    raise AssertionError("expected ValueError")
"#);
}

#[test]
fn doubling_galerkin_and_distance() {
    run(r#"
d = ra.PiecewiseMap.doubling()
a = ra.galerkin_matrix(d, 4)
assert len(a) == 9 and all(len(r) == 9 for r in a)
assert abs(a[4][4][0] - 1.0) < 1e-9
assert ra.d_ly(d, d) == 0.0
ok, slope, _, failures = d.validate()
assert ok and abs(slope - 2.0) < 1e-12 and failures == []
"#);
}

#[test]
fn push_forward_keeps_unit_mass() {
    run(r#"
out = ra.push_forward(k=100, q=100, steps=3, record=[3])
pts = out[3]
assert len(pts) == 100
assert abs(sum(v for _, v in pts) / 100 - 1.0) < 1e-10
"#);
}
