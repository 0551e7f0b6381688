//! Python bindings. Points, cut positions and cell counts are 0-based
//! `(x, y, z)` tuples; matrices are lists of rows with entries in `0..p`.

use blockcube::io::{module_from_json, module_to_json, report_from_json, report_to_json};
use blockcube::{Block, Cuboid, ExactModule, ExactnessMode, Field, Grid, GridPoint};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

type Cells = (usize, usize, usize);
type Entry = (String, Cells, Cells, usize);

fn err(e: blockcube::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn arr(t: Cells) -> [usize; 3] {
    [t.0, t.1, t.2]
}

fn tup(a: [usize; 3]) -> Cells {
    (a[0], a[1], a[2])
}

fn field(prime: Option<u64>) -> PyResult<Field> {
    prime.map_or(Ok(Field::default()), |p| Field::new(p).map_err(err))
}

fn grid(cells: Cells) -> PyResult<Grid> {
    Grid::new(arr(cells)).map_err(err)
}

fn block_tuple(b: &Block, n: usize) -> Entry {
    (b.class.to_string(), tup(b.a), tup(b.b), n)
}

fn exact(m: &blockcube::GridModule) -> PyResult<ExactModule> {
    ExactModule::new(m.clone()).map_err(err)
}

#[pyclass(name = "GridModule", module = "pyblockcube", frozen)]
struct PyGridModule(blockcube::GridModule);

#[pymethods]
impl PyGridModule {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        module_from_json(text).map(Self).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
        module_from_json(&text)
            .map(Self)
            .map_err(|e| PyValueError::new_err(format!("{path}: {e}")))
    }

    #[staticmethod]
    #[pyo3(signature = (cells, prime=None))]
    fn zero(cells: Cells, prime: Option<u64>) -> PyResult<Self> {
        Ok(Self(blockcube::GridModule::zero(
            field(prime)?,
            grid(cells)?,
        )))
    }

    fn to_json(&self) -> String {
        module_to_json(&self.0)
    }

    #[getter]
    fn cells(&self) -> Cells {
        tup(self.0.grid().cells())
    }

    #[getter]
    fn prime(&self) -> u32 {
        self.0.field().prime()
    }

    #[getter]
    fn total_dim(&self) -> usize {
        self.0.total_dim()
    }

    fn dim(&self, t: Cells) -> PyResult<usize> {
        let t = GridPoint(arr(t));
        if !self.0.grid().contains(t) {
            return Err(PyValueError::new_err(format!("{t} is outside the grid")));
        }
        Ok(self.0.dim(t))
    }

    /// Dimensions keyed by point.
    fn dims(&self) -> Vec<(Cells, usize)> {
        self.0
            .grid()
            .points()
            .map(|t| (tup(t.0), self.0.dim(t)))
            .collect()
    }

    fn transition(&self, s: Cells, t: Cells) -> PyResult<Vec<Vec<u32>>> {
        let (s, t) = (GridPoint(arr(s)), GridPoint(arr(t)));
        for p in [s, t] {
            if !self.0.grid().contains(p) {
                return Err(PyValueError::new_err(format!("{p} is outside the grid")));
            }
        }
        self.0.transition(s, t).map(|m| m.to_rows()).map_err(err)
    }

    /// Problems found by validation; empty for a valid module.
    fn validate(&self) -> Vec<String> {
        self.0
            .validate()
            .problems
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    #[pyo3(signature = (mode="exhaustive"))]
    fn check(&self, mode: &str) -> PyResult<ExactnessReport> {
        let mode = match mode {
            "exhaustive" => ExactnessMode::Exhaustive,
            "unit-cells" | "unit_cells" => ExactnessMode::UnitCells,
            other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
        };
        blockcube::check_strong_exactness(&self.0, mode)
            .map(ExactnessReport)
            .map_err(err)
    }

    fn decompose(&self) -> PyResult<DecompositionReport> {
        blockcube::decompose(&self.0)
            .map(DecompositionReport)
            .map_err(err)
    }

    fn verify(&self, report: &DecompositionReport) -> PyResult<bool> {
        Ok(blockcube::verify_direct_sum(&exact(&self.0)?, &report.0))
    }

    /// Multiplicity of the block with lower cuts `a` and upper cuts `b`.
    fn counting_dim(&self, a: Cells, b: Cells) -> PyResult<usize> {
        let c = Cuboid::new(self.0.grid(), arr(a), arr(b)).map_err(err)?;
        blockcube::counting_dim(&exact(&self.0)?, &c).map_err(err)
    }

    fn dualize(&self) -> Self {
        Self(self.0.dualize())
    }

    fn direct_sum(&self, other: &Self) -> PyResult<Self> {
        self.0.direct_sum(&other.0).map(Self).map_err(err)
    }

    fn basis_twist(&self, seed: u64) -> Self {
        Self(self.0.basis_twist(seed))
    }

    fn perturb(&self, seed: u64) -> PyResult<Self> {
        blockcube::perturb(&self.0, seed).map(Self).map_err(err)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!(
            "GridModule(cells={:?}, prime={}, total_dim={})",
            self.cells(),
            self.prime(),
            self.total_dim()
        )
    }
}

#[pyclass(module = "pyblockcube", frozen)]
struct ExactnessReport(blockcube::ExactnessReport);

#[pymethods]
impl ExactnessReport {
    #[getter]
    fn overall(&self) -> bool {
        self.0.overall
    }

    /// `(axis, index, lower, upper)` for each failing slice square.
    #[getter]
    fn slice_failures(&self) -> Vec<(usize, usize, Cells, Cells)> {
        self.0
            .slice_failures
            .iter()
            .map(|f| (f.axis, f.index, tup(f.lower.0), tup(f.upper.0)))
            .collect()
    }

    /// `(condition, s, t)` for each failing cube, condition `"psi"` or `"phi"`.
    #[getter]
    fn cube_failures(&self) -> Vec<(String, Cells, Cells)> {
        self.0
            .cube_failures
            .iter()
            .map(|f| (f.condition.to_string(), tup(f.s.0), tup(f.t.0)))
            .collect()
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.0).expect("serializable")
    }

    fn __bool__(&self) -> bool {
        self.0.overall
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

#[pyclass(module = "pyblockcube", frozen)]
struct DecompositionReport(blockcube::DecompositionReport);

#[pymethods]
impl DecompositionReport {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        report_from_json(text).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        report_to_json(&self.0)
    }

    #[getter]
    fn verified(&self) -> bool {
        self.0.verified
    }

    /// `(class, a, b, multiplicity)` sorted by cuts.
    #[getter]
    fn entries(&self) -> Vec<Entry> {
        self.0
            .entries
            .iter()
            .map(|e| block_tuple(&e.block, e.multiplicity))
            .collect()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

/// All blocks of a grid as `(class, a, b)`.
#[pyfunction]
fn enumerate_blocks(cells: Cells) -> PyResult<Vec<(String, Cells, Cells)>> {
    Ok(blockcube::enumerate_blocks(grid(cells)?)
        .iter()
        .map(|b| (b.class.to_string(), tup(b.a), tup(b.b)))
        .collect())
}

#[pyfunction]
#[pyo3(signature = (cells, a, b, prime=None))]
fn block_module(cells: Cells, a: Cells, b: Cells, prime: Option<u64>) -> PyResult<PyGridModule> {
    let g = grid(cells)?;
    let c = Cuboid::new(g, arr(a), arr(b)).map_err(err)?;
    Ok(PyGridModule(blockcube::block_module(field(prime)?, g, &c)))
}

/// A random block sum and the `(class, a, b, multiplicity)` list it was built from.
#[pyfunction]
#[pyo3(signature = (cells, seed, max_blocks=3, max_mult=2, prime=None))]
fn random_block_sum(
    cells: Cells,
    seed: u64,
    max_blocks: usize,
    max_mult: usize,
    prime: Option<u64>,
) -> PyResult<(PyGridModule, Vec<Entry>)> {
    let t = blockcube::random_block_sum(field(prime)?, grid(cells)?, seed, max_blocks, max_mult);
    let truth = t.multiset.iter().map(|(b, n)| block_tuple(b, *n)).collect();
    Ok((PyGridModule(t.module), truth))
}

/// The 2×2×2 module whose slices are all exact but which fails the cube condition.
#[pyfunction]
#[pyo3(signature = (prime=None))]
fn counterexample(prime: Option<u64>) -> PyResult<PyGridModule> {
    Ok(PyGridModule(blockcube::counterexample(field(prime)?)))
}

#[pymodule]
fn pyblockcube(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGridModule>()?;
    m.add_class::<ExactnessReport>()?;
    m.add_class::<DecompositionReport>()?;
    m.add_function(wrap_pyfunction!(enumerate_blocks, m)?)?;
    m.add_function(wrap_pyfunction!(block_module, m)?)?;
    m.add_function(wrap_pyfunction!(random_block_sum, m)?)?;
    m.add_function(wrap_pyfunction!(counterexample, m)?)?;
    Ok(())
}
