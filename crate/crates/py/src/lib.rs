//! Python bindings: the field tower, the scatteredness oracle, plane
//! classification, family constructors, the witness solver, curve counting,
//! and the scan campaigns. Field elements cross the boundary in
//! generator-power notation ("g^k" or "0").

use msls5::config::{classify, ConfigClass};
use msls5::curve::{conic_case, CurveError, CurveQ};
use msls5::families::{sctness_solve, FamilySpec, SctnessOutcome};
use msls5::gfield::{FFElement, FieldCtx};
use msls5::linpoly::{parse_poly, scatter_check, LinearSet, ScatterScratch};
use msls5::projgeom::{gamma_from_poly, SubgeometryModel};
use msls5::search::{run_scan, Campaign, ScanConfig};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::sync::Arc;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass]
struct Field {
    ctx: Arc<FieldCtx>,
}

impl Field {
    fn elt(&self, text: &str) -> PyResult<FFElement> {
        if let Ok(k) = text.trim().parse::<i64>() {
            return Ok(self.ctx.from_int(k));
        }
        self.ctx.parse_elt(text).map_err(err)
    }

    fn set_dict<'py>(&self, py: Python<'py>, set: &LinearSet) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        d.set_item("rank", set.rank)?;
        d.set_item("size", set.size())?;
        d.set_item("scattered", set.is_scattered())?;
        let digest = set.digest(&self.ctx);
        d.set_item("sha256", digest.sha256)?;
        Ok(d)
    }
}

#[pymethods]
impl Field {
    #[new]
    fn new(p: u32, h: u32) -> PyResult<Self> {
        Ok(Field {
            ctx: FieldCtx::shared(p, h).map_err(err)?,
        })
    }

    /// Construct from "q" or "p^h" notation, e.g. "9" or "3^2".
    #[staticmethod]
    fn from_q(q: &str) -> PyResult<Self> {
        let (p, h) = FieldCtx::parse_q(q).map_err(err)?;
        Field::new(p, h)
    }

    #[getter]
    fn p(&self) -> u32 {
        self.ctx.p()
    }

    #[getter]
    fn h(&self) -> u32 {
        self.ctx.h()
    }

    #[getter]
    fn q(&self) -> u32 {
        self.ctx.q()
    }

    #[getter]
    fn big_size(&self) -> u32 {
        self.ctx.big_size()
    }

    /// (q^5 - 1)/(q - 1): the size of the canonical subgeometry.
    #[getter]
    fn sigma_size(&self) -> u32 {
        self.ctx.coset_count()
    }

    fn descriptor<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        let desc = self.ctx.descriptor();
        d.set_item("p", desc.p)?;
        d.set_item("h", desc.h)?;
        d.set_item("defining_poly", desc.defining_poly)?;
        Ok(d)
    }

    // element arithmetic in generator-power notation
    fn add(&self, a: &str, b: &str) -> PyResult<String> {
        Ok(self.ctx.fmt_elt(self.ctx.add(self.elt(a)?, self.elt(b)?)))
    }

    fn mul(&self, a: &str, b: &str) -> PyResult<String> {
        Ok(self.ctx.fmt_elt(self.ctx.mul(self.elt(a)?, self.elt(b)?)))
    }

    fn inv(&self, a: &str) -> PyResult<String> {
        let x = self.elt(a)?;
        if x.is_zero() {
            return Err(PyValueError::new_err("inverse of zero"));
        }
        Ok(self.ctx.fmt_elt(self.ctx.inv(x)))
    }

    fn frobenius(&self, a: &str, i: usize) -> PyResult<String> {
        Ok(self.ctx.fmt_elt(self.ctx.frob(self.elt(a)?, i)))
    }

    fn trace(&self, a: &str) -> PyResult<String> {
        Ok(self.ctx.fmt_elt(self.ctx.trace(self.elt(a)?)))
    }

    fn norm(&self, a: &str) -> PyResult<String> {
        Ok(self.ctx.fmt_elt(self.ctx.norm(self.elt(a)?)))
    }

    /// Scatteredness of a linearized polynomial ("x^q", "g^3*x^q4 + x", or a
    /// coefficient list "a0,a1,a2,a3,a4").
    fn scattered_check<'py>(&self, py: Python<'py>, poly: &str) -> PyResult<Bound<'py, PyDict>> {
        let f = parse_poly(&self.ctx, poly).map_err(err)?;
        let mut scratch = ScatterScratch::new(&self.ctx);
        let d = PyDict::new(py);
        match scatter_check(&self.ctx, &f, &mut scratch).map_err(err)? {
            msls5::linpoly::Scatteredness::Scattered => {
                let set = LinearSet::of_poly(&self.ctx, &f);
                d.set_item("scattered", true)?;
                d.set_item("size", set.size())?;
            }
            msls5::linpoly::Scatteredness::Witness(y, z) => {
                d.set_item("scattered", false)?;
                d.set_item(
                    "witness",
                    (self.ctx.fmt_elt(y), self.ctx.fmt_elt(z)),
                )?;
            }
        }
        Ok(d)
    }

    /// The weighted linear set of a polynomial.
    fn linear_set<'py>(&self, py: Python<'py>, poly: &str) -> PyResult<Bound<'py, PyDict>> {
        let f = parse_poly(&self.ctx, poly).map_err(err)?;
        let set = LinearSet::of_poly(&self.ctx, &f);
        self.set_dict(py, &set)
    }

    /// Classify the plane Γ_{f0} of a coefficient triple (Moore model).
    fn classify_triple<'py>(
        &self,
        py: Python<'py>,
        a2: &str,
        a3: &str,
        a4: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let gamma = gamma_from_poly(&self.ctx, self.elt(a2)?, self.elt(a3)?, self.elt(a4)?);
        let model = SubgeometryModel::moore(&self.ctx, 1);
        let report = classify(&self.ctx, &model, &gamma).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item(
            "class",
            match report.class {
                ConfigClass::InvalidVertex => "invalid_vertex",
                ConfigClass::NonScattered => "non_scattered",
                ConfigClass::Pseudoregulus => "pseudoregulus",
                ConfigClass::LpConfigI => "lp_config_i",
                ConfigClass::LpConfigII => "lp_config_ii",
                ConfigClass::NewCandidate => "new_candidate",
            },
        )?;
        if let Some(ex) = &report.extraction {
            d.set_item("rk_a", ex.rk_a)?;
            d.set_item("rk_b", ex.rk_b)?;
            d.set_item("lambda", self.ctx.fmt_elt(ex.lambda))?;
            d.set_item("mu", self.ctx.fmt_elt(ex.mu))?;
            d.set_item(
                "u4",
                ex.u4
                    .iter()
                    .map(|c| self.ctx.fmt_elt(*c))
                    .collect::<Vec<_>>(),
            )?;
        }
        Ok(d)
    }

    /// Build a named family member and report its set data.
    /// kinds: pseudoregulus(s) | lp(delta, s) | alpha_beta(alpha, beta, s) |
    /// forma_e(e, s) | forma_k(k, delta, s) | c3(eta, rho) | c4(k) | f1(eta) |
    /// gb(b)
    #[pyo3(signature = (kind, params, s = 1))]
    fn family<'py>(
        &self,
        py: Python<'py>,
        kind: &str,
        params: Vec<String>,
        s: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let e = |i: usize| -> PyResult<FFElement> {
            self.elt(
                params
                    .get(i)
                    .ok_or_else(|| PyValueError::new_err("missing parameter"))?,
            )
        };
        let spec = match kind {
            "pseudoregulus" => FamilySpec::Pseudoregulus { s },
            "lp" => FamilySpec::Lp { delta: e(0)?, s },
            "alpha_beta" => FamilySpec::AlphaBeta {
                alpha: e(0)?,
                beta: e(1)?,
                s,
            },
            "forma_e" => FamilySpec::FormaE { e: e(0)?, s },
            "forma_k" => FamilySpec::FormaK {
                k: e(0)?,
                delta: e(1)?,
                s,
            },
            "c3" => FamilySpec::C3 {
                eta: e(0)?,
                rho: e(1)?,
            },
            "c4" => FamilySpec::C4 { k: e(0)? },
            "f1" => FamilySpec::F1 { eta: e(0)? },
            "gb" => FamilySpec::Gb { b: e(0)? },
            _ => return Err(PyValueError::new_err(format!("unknown family {kind:?}"))),
        };
        let set = spec.construct(&self.ctx).map_err(err)?;
        self.set_dict(py, &set)
    }

    /// Witness x for the two-equation system of a (delta, eps) pair, or None.
    fn sctness_witness(&self, delta: &str, eps: &str, s: usize) -> PyResult<Option<String>> {
        match sctness_solve(&self.ctx, self.elt(delta)?, self.elt(eps)?, s).map_err(err)? {
            SctnessOutcome::Witness(x) => Ok(Some(self.ctx.fmt_elt(x))),
            SctnessOutcome::NoSolution => Ok(None),
        }
    }

    /// Affine point count of the curve of (delta, eps) over F_{q^k}, k in {1,5}.
    fn curve_count(&self, delta: &str, eps: &str, k: usize) -> PyResult<u64> {
        let curve = CurveQ::new(&self.ctx, self.elt(delta)?, self.elt(eps)?).map_err(err)?;
        Ok(curve.count_points(&self.ctx, k))
    }

    /// The eps = 1 conic chain; None when x^2 + 3x + 1 has no usable root.
    fn conic_witness(&self, s: usize) -> PyResult<Option<(String, String)>> {
        match conic_case(&self.ctx, s) {
            Ok(w) => Ok(Some((self.ctx.fmt_elt(w.delta), self.ctx.fmt_elt(w.ell)))),
            Err(CurveError::NoDeltaRoot) | Err(CurveError::InvalidPair(_)) => Ok(None),
            Err(e) => Err(err(e)),
        }
    }

    /// Run a campaign; returns the summary counts.
    #[pyo3(signature = (campaign, s_set = vec![1], reduce = true, shards = 1, jobs = 1, seed = 1))]
    fn scan<'py>(
        &self,
        py: Python<'py>,
        campaign: &str,
        s_set: Vec<usize>,
        reduce: bool,
        shards: usize,
        jobs: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let campaign = match campaign {
            "census" => Campaign::Census,
            "tconj" => Campaign::TConj,
            "c3c4" => Campaign::C3C4,
            "formak" => Campaign::FormaK,
            _ => return Err(PyValueError::new_err("unknown campaign")),
        };
        let mut cfg = ScanConfig::new(campaign, self.ctx.p(), self.ctx.h());
        cfg.s_set = s_set;
        cfg.reduce = reduce;
        cfg.shards = shards.max(1);
        cfg.jobs = jobs.max(1);
        cfg.seed = seed;
        let summary = py
            .detach(|| run_scan(&cfg))
            .map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("units", summary.units)?;
        d.set_item("records", summary.records)?;
        d.set_item("counterexamples", summary.counterexamples)?;
        d.set_item("complete", summary.complete)?;
        let census = PyDict::new(py);
        for (k, v) in &summary.census {
            census.set_item(k, v)?;
        }
        d.set_item("census", census)?;
        Ok(d)
    }
}

#[pymodule]
fn msls5py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Field>()?;
    Ok(())
}
