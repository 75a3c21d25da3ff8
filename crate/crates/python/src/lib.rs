use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use clonelab::axioms::is_clone_structure;
use clonelab::clones::all_clone_sets;
use clonelab::pqtree::{build_tree, PqTree};
use clonelab::single_crossing::{self as sc, VoterOrder, X3CInstance};
use clonelab::single_peaked::{self as sp, Axis};
use clonelab::{synthesis, CandidateSet, DecloneResult, SetFamily};

fn err(e: clonelab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn sets_out(sets: &[CandidateSet]) -> Vec<Vec<usize>> {
    sets.iter().map(|s| s.members().to_vec()).collect()
}

fn family(m: usize, sets: Vec<Vec<usize>>) -> PyResult<SetFamily> {
    SetFamily::new(m, sets.into_iter().map(CandidateSet::new)).map_err(err)
}

/// Decloned profile with `(set, fresh id)` pairs.
type Decloned = (Profile, Vec<(Vec<usize>, usize)>);

/// A profile of linear orders over candidates `0..m`.
#[pyclass(name = "Profile", frozen, skip_from_py_object, module = "clonelab_py")]
#[derive(Clone)]
struct Profile(clonelab::Profile);

#[pymethods]
impl Profile {
    #[new]
    fn new(rankings: Vec<Vec<usize>>) -> PyResult<Self> {
        clonelab::Profile::from_rankings(rankings).map(Profile).map_err(err)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        clonelab::Profile::parse(text).map(Profile).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        clonelab::Profile::from_json(text).map(Profile).map_err(err)
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn rankings(&self) -> Vec<Vec<usize>> {
        self.0.orders().iter().map(|o| o.ranking().to_vec()).collect()
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    /// All clone sets, including singletons and the full candidate set.
    fn clone_sets(&self) -> Vec<Vec<usize>> {
        sets_out(all_clone_sets(&self.0).sets())
    }

    fn is_clone(&self, set: Vec<usize>) -> PyResult<bool> {
        clonelab::clones::is_clone_set(&self.0, &CandidateSet::new(set)).map_err(err)
    }

    /// Bracket notation of the clone decomposition tree, e.g. `[0 (1 2) 3]`.
    fn pq_tree(&self) -> PyResult<String> {
        build_tree(&all_clone_sets(&self.0)).map(|t| t.shape().to_bracket()).map_err(err)
    }

    fn single_peaked_axis(&self) -> Option<Vec<usize>> {
        sp::is_single_peaked(&self.0).map(|a| a.order().to_vec())
    }

    fn is_single_peaked_wrt(&self, axis: Vec<usize>) -> PyResult<bool> {
        let ax = Axis::new(axis).map_err(err)?;
        if ax.len() != self.0.m() {
            return Err(PyValueError::new_err("axis length differs from the number of candidates"));
        }
        Ok(sp::is_single_peaked_wrt(&self.0, &ax))
    }

    fn single_crossing_order(&self) -> Option<Vec<usize>> {
        sc::is_single_crossing(&self.0).map(|o| o.voters().to_vec())
    }

    /// Collapse clone sets into single candidates; returns the new profile
    /// and `(set, fresh id)` pairs.
    fn declone(&self, sets: Vec<Vec<usize>>) -> PyResult<Decloned> {
        let sets: Vec<CandidateSet> = sets.into_iter().map(CandidateSet::new).collect();
        clonelab::declone(&self.0, &sets).map(result).map_err(err)
    }

    #[pyo3(signature = (algorithm = "full"))]
    fn declone_single_peaked(&self, algorithm: &str) -> PyResult<Decloned> {
        match algorithm {
            "full" => Ok(result(sp::declone_sp(&self.0))),
            "basic" => Ok(result(sp::basic_declone_sp(&self.0).0)),
            _ => Err(PyValueError::new_err(format!("unknown algorithm {algorithm:?}"))),
        }
    }

    #[pyo3(signature = (order = None))]
    fn declone_single_crossing(&self, order: Option<Vec<usize>>) -> PyResult<Decloned> {
        let ord = match order {
            Some(v) => VoterOrder::new(v).map_err(err)?,
            None => VoterOrder::identity(self.0.n()),
        };
        sc::sc_declone_fixed(&self.0, &ord).map(result).map_err(err)
    }

    /// Best single-crossing decloning with at least `k` candidates over all
    /// voter orders, or `None` when there is none.
    #[pyo3(signature = (k, budget = sc::DEFAULT_EXACT_BUDGET))]
    fn declone_single_crossing_exact(&self, k: usize, budget: usize) -> PyResult<Option<Decloned>> {
        sc::sc_declone_exact(&self.0, k, budget).map(|r| r.map(result)).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Profile(m={}, n={})", self.0.m(), self.0.n())
    }

    fn __eq__(&self, other: &Profile) -> bool {
        self.0 == other.0
    }
}

fn result(r: DecloneResult) -> Decloned {
    let mapping = r.mapping.iter().map(|(s, c)| (s.members().to_vec(), *c)).collect();
    (Profile(r.profile), mapping)
}

/// Names of the violated axioms; empty for a clone structure.
#[pyfunction]
fn violated_axioms(m: usize, sets: Vec<Vec<usize>>) -> PyResult<Vec<String>> {
    let report = is_clone_structure(&family(m, sets)?);
    Ok(report.violations.iter().map(|v| v.axiom.to_string()).collect())
}

/// Profile whose clone sets are exactly the given family.
#[pyfunction]
#[pyo3(signature = (m, sets, flavor = "minimal"))]
fn implement(m: usize, sets: Vec<Vec<usize>>, flavor: &str) -> PyResult<Profile> {
    let f = family(m, sets)?;
    let p = match flavor {
        "minimal" => synthesis::implement_family(&f),
        "single-crossing" => synthesis::implement_single_crossing(&f),
        "single-peaked" => build_tree(&f).and_then(|t| synthesis::implement_single_peaked_tree(&t)),
        _ => return Err(PyValueError::new_err(format!("unknown flavor {flavor:?}"))),
    };
    p.map(Profile).map_err(err)
}

#[pyfunction]
fn tree_family(tree_json: &str) -> PyResult<Vec<Vec<usize>>> {
    let t = PqTree::from_json(tree_json).map_err(err)?;
    Ok(sets_out(clonelab::pqtree::tree_to_family(&t).sets()))
}

/// Reduction from exact cover by 3-sets; returns the profile and the
/// candidate count a single-crossing decloning must reach.
#[pyfunction]
fn x3c_reduction(k: usize, sets: Vec<[usize; 3]>) -> PyResult<(Profile, usize)> {
    let inst = X3CInstance::new(k, sets).map_err(err)?;
    let r = sc::x3c_reduction(&inst).map_err(err)?;
    Ok((Profile(r.profile), r.target))
}

#[pymodule]
fn clonelab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Profile>()?;
    m.add_function(wrap_pyfunction!(violated_axioms, m)?)?;
    m.add_function(wrap_pyfunction!(implement, m)?)?;
    m.add_function(wrap_pyfunction!(tree_family, m)?)?;
    m.add_function(wrap_pyfunction!(x3c_reduction, m)?)?;
    Ok(())
}
