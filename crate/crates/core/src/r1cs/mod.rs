//! Rank-1 constraint systems: a builder with labelled scopes, a gadget
//! library, witness generation and the `HSR1` binary format.
//!
//! Circuits are written against [`CircuitBuilder`]. Every allocated wire is
//! either an *input* (its value is looked up by label in an [`Assignment`])
//! or *computed* by a solver closure that reads previously allocated wires.
//! [`CircuitBuilder::finalize`] freezes the layout so that the constant-one
//! wire sits at index 0, public wires at `1..=l` and private wires after
//! them.
//!
//! ```
//! use v2x_zk::field::{PrimeField, TestField};
//! use v2x_zk::r1cs::{Assignment, CircuitBuilder};
//!
//! let mut cs = CircuitBuilder::<TestField>::new();
//! let x = cs.alloc_private("x");
//! let y = cs.alloc_private("y");
//! let z = cs.alloc_public("z");
//! cs.enforce(x, y, z);
//! let cs = cs.finalize().unwrap();
//!
//! let mut a = Assignment::new();
//! a.set("x", TestField::from_u64(3));
//! a.set("y", TestField::from_u64(4));
//! a.set("z", TestField::from_u64(12));
//! let w = cs.generate_witness(&a).unwrap();
//! assert_eq!(w.public_inputs(), &[TestField::from_u64(12)]);
//! ```

mod file;
mod gadgets;
mod lc;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::field::PrimeField;

pub use file::{MAGIC as HSR1_MAGIC, VERSION as HSR1_VERSION};
pub use gadgets::{DIST_BITS, PROB_BITS};
pub use lc::{LinearCombination, Variable};

/// Errors raised while building, solving or checking a constraint system.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum R1csError {
    #[error("missing assignment for input \"{0}\"")]
    MissingInput(String),
    #[error("solver for wire \"{label}\" failed: {reason}")]
    Solver { label: String, reason: String },
    #[error("constraint {row} ({label}) is not satisfied")]
    Unsatisfied { row: usize, label: String },
    #[error("witness has {got} entries, the system expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("constraint \"{label}\" references unallocated wire {index}")]
    UnallocatedWire { index: usize, label: String },
    #[error("constraint system was loaded without a witness program")]
    NoWitnessProgram,
    #[error("malformed r1cs file: {0}")]
    Format(String),
}

/// Values of the wires allocated so far, indexed by [`Variable`].
pub struct Values<'a, F> {
    values: &'a [F],
}

impl<F: PrimeField> Values<'_, F> {
    pub fn get(&self, v: Variable) -> F {
        self.values[v.index()]
    }

    pub fn eval(&self, lc: &LinearCombination<F>) -> F {
        lc.evaluate(self.values)
    }
}

type SolverFn<F> = dyn Fn(&Values<'_, F>) -> Result<F, String> + Send + Sync;

#[derive(Clone)]
enum Source<F> {
    One,
    Input,
    Computed(Arc<SolverFn<F>>),
}

#[derive(Clone)]
struct WireInfo<F> {
    label: String,
    public: bool,
    source: Source<F>,
}

/// Named input values used by [`ConstraintSystem::generate_witness`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment<F> {
    values: BTreeMap<String, F>,
}

impl<F: PrimeField> Assignment<F> {
    pub fn new() -> Self {
        Assignment {
            values: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, label: impl Into<String>, value: F) -> &mut Self {
        self.values.insert(label.into(), value);
        self
    }

    pub fn get(&self, label: &str) -> Option<F> {
        self.values.get(label).copied()
    }

    pub fn remove(&mut self, label: &str) -> Option<F> {
        self.values.remove(label)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &F)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v))
    }
}

#[derive(Clone)]
struct Row<F> {
    a: LinearCombination<F>,
    b: LinearCombination<F>,
    c: LinearCombination<F>,
    label: String,
}

/// Mutable circuit under construction.
pub struct CircuitBuilder<F: PrimeField> {
    wires: Vec<WireInfo<F>>,
    rows: Vec<Row<F>>,
    scopes: Vec<String>,
    labels_seen: HashSet<String>,
    error: Option<R1csError>,
}

impl<F: PrimeField> Default for CircuitBuilder<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: PrimeField> CircuitBuilder<F> {
    pub fn new() -> Self {
        CircuitBuilder {
            wires: vec![WireInfo {
                label: "one".into(),
                public: true,
                source: Source::One,
            }],
            rows: Vec::new(),
            scopes: Vec::new(),
            labels_seen: HashSet::new(),
            error: None,
        }
    }

    /// The constant-one wire.
    pub fn one() -> Variable {
        Variable::ONE
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    /// Number of wires including the constant-one wire.
    pub fn num_wires(&self) -> usize {
        self.wires.len()
    }

    fn scoped_label(&self, label: &str) -> String {
        if self.scopes.is_empty() {
            label.to_string()
        } else {
            format!("{}/{}", self.scopes.join("/"), label)
        }
    }

    /// Runs `f` with `name` pushed onto the label scope.
    pub fn scoped<R>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> R) -> R {
        self.scopes.push(name.to_string());
        let out = f(self);
        self.scopes.pop();
        out
    }

    fn push_wire(&mut self, label: String, public: bool, source: Source<F>) -> Variable {
        if matches!(source, Source::Input) && !self.labels_seen.insert(label.clone()) {
            log::warn!("duplicate input label \"{label}\"; both wires read the same value");
        }
        self.wires.push(WireInfo { label, public, source });
        Variable::new(self.wires.len() - 1)
    }

    /// A public input, assigned by `label`. Labels of inputs are taken
    /// verbatim, without the scope prefix.
    pub fn alloc_public(&mut self, label: &str) -> Variable {
        self.push_wire(label.to_string(), true, Source::Input)
    }

    /// A private input, assigned by `label`.
    pub fn alloc_private(&mut self, label: &str) -> Variable {
        self.push_wire(label.to_string(), false, Source::Input)
    }

    /// A public wire whose value the solver derives from earlier wires.
    pub fn alloc_public_with(
        &mut self,
        label: &str,
        solver: impl Fn(&Values<'_, F>) -> Result<F, String> + Send + Sync + 'static,
    ) -> Variable {
        let label = self.scoped_label(label);
        self.push_wire(label, true, Source::Computed(Arc::new(solver)))
    }

    /// A private (hint or intermediate) wire computed by `solver`.
    pub fn alloc_private_with(
        &mut self,
        label: &str,
        solver: impl Fn(&Values<'_, F>) -> Result<F, String> + Send + Sync + 'static,
    ) -> Variable {
        let label = self.scoped_label(label);
        self.push_wire(label, false, Source::Computed(Arc::new(solver)))
    }

    /// Appends the constraint `<a, w> * <b, w> = <c, w>`.
    pub fn enforce(
        &mut self,
        a: impl Into<LinearCombination<F>>,
        b: impl Into<LinearCombination<F>>,
        c: impl Into<LinearCombination<F>>,
    ) {
        self.enforce_labeled("constraint", a, b, c)
    }

    pub fn enforce_labeled(
        &mut self,
        label: &str,
        a: impl Into<LinearCombination<F>>,
        b: impl Into<LinearCombination<F>>,
        c: impl Into<LinearCombination<F>>,
    ) {
        let row = Row {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            label: self.scoped_label(label),
        };
        if self.error.is_none() {
            let bound = self.wires.len();
            let max = [&row.a, &row.b, &row.c].iter().filter_map(|lc| lc.max_index()).max();
            if let Some(index) = max.filter(|&i| i >= bound) {
                self.error = Some(R1csError::UnallocatedWire {
                    index,
                    label: row.label.clone(),
                });
            }
        }
        self.rows.push(row);
    }

    /// `a = b`, as `a * 1 = b`.
    pub fn enforce_equal(
        &mut self,
        label: &str,
        a: impl Into<LinearCombination<F>>,
        b: impl Into<LinearCombination<F>>,
    ) {
        self.enforce_labeled(label, a, Variable::ONE, b)
    }

    /// Freezes the layout and appends one binding row `w_j * 0 = 0` per
    /// public wire, so that every public input enters the proof even when no
    /// other constraint reads it.
    pub fn finalize(mut self) -> Result<ConstraintSystem<F>, R1csError> {
        if let Some(err) = self.error.take() {
            return Err(err);
        }
        for j in 0..self.wires.len() {
            if self.wires[j].public {
                let label = format!("public-binding/{}", self.wires[j].label);
                self.rows.push(Row {
                    a: Variable::new(j).into(),
                    b: LinearCombination::zero(),
                    c: LinearCombination::zero(),
                    label,
                });
            }
        }

        let mut perm = vec![0usize; self.wires.len()];
        let mut next = 0;
        for public in [true, false] {
            for (j, w) in self.wires.iter().enumerate() {
                if w.public == public {
                    perm[j] = next;
                    next += 1;
                }
            }
        }
        let num_public = self.wires.iter().filter(|w| w.public).count() - 1;
        let mut wire_labels = vec![String::new(); self.wires.len()];
        for (j, w) in self.wires.iter().enumerate() {
            wire_labels[perm[j]] = w.label.clone();
        }
        let mut a = Vec::with_capacity(self.rows.len());
        let mut b = Vec::with_capacity(self.rows.len());
        let mut c = Vec::with_capacity(self.rows.len());
        let mut row_labels = Vec::with_capacity(self.rows.len());
        for row in self.rows {
            a.push(row.a.remap(&perm));
            b.push(row.b.remap(&perm));
            c.push(row.c.remap(&perm));
            row_labels.push(row.label);
        }
        Ok(ConstraintSystem {
            num_wires: perm.len(),
            num_public,
            a,
            b,
            c,
            row_labels,
            wire_labels,
            program: Some(Arc::new(Program {
                wires: self.wires,
                perm,
            })),
        })
    }
}

struct Program<F> {
    wires: Vec<WireInfo<F>>,
    /// Builder index to final wire index.
    perm: Vec<usize>,
}

/// A dense witness vector `w` with `w[0] = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness<F> {
    values: Vec<F>,
    num_public: usize,
}

impl<F: PrimeField> Witness<F> {
    pub fn new(values: Vec<F>, num_public: usize) -> Self {
        Witness { values, num_public }
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [F] {
        &mut self.values
    }

    /// `w[1..=l]`.
    pub fn public_inputs(&self) -> &[F] {
        &self.values[1..=self.num_public]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A finalized, immutable constraint system.
#[derive(Clone)]
pub struct ConstraintSystem<F> {
    num_wires: usize,
    num_public: usize,
    a: Vec<LinearCombination<F>>,
    b: Vec<LinearCombination<F>>,
    c: Vec<LinearCombination<F>>,
    row_labels: Vec<String>,
    wire_labels: Vec<String>,
    program: Option<Arc<Program<F>>>,
}

impl<F: PrimeField> fmt::Debug for ConstraintSystem<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConstraintSystem")
            .field("field", &F::NAME)
            .field("constraints", &self.num_constraints())
            .field("wires", &self.num_wires)
            .field("public", &self.num_public)
            .finish()
    }
}

impl<F: PrimeField> ConstraintSystem<F> {
    /// `n`.
    pub fn num_constraints(&self) -> usize {
        self.a.len()
    }

    /// `m + 1`, the constant-one wire included.
    pub fn num_wires(&self) -> usize {
        self.num_wires
    }

    /// `l`.
    pub fn num_public(&self) -> usize {
        self.num_public
    }

    pub fn a_rows(&self) -> &[LinearCombination<F>] {
        &self.a
    }

    pub fn b_rows(&self) -> &[LinearCombination<F>] {
        &self.b
    }

    pub fn c_rows(&self) -> &[LinearCombination<F>] {
        &self.c
    }

    pub fn row_label(&self, row: usize) -> &str {
        &self.row_labels[row]
    }

    pub fn wire_label(&self, wire: usize) -> &str {
        &self.wire_labels[wire]
    }

    /// Labels of the public wires in order.
    pub fn public_labels(&self) -> &[String] {
        &self.wire_labels[1..=self.num_public]
    }

    /// Final index of a builder variable.
    pub fn wire_index(&self, v: Variable) -> usize {
        match &self.program {
            Some(p) => p.perm[v.index()],
            None => v.index(),
        }
    }

    /// Index of the first wire carrying `label`.
    pub fn find_wire(&self, label: &str) -> Option<usize> {
        self.wire_labels.iter().position(|l| l == label)
    }

    fn row_holds(&self, i: usize, w: &[F]) -> bool {
        self.a[i].evaluate(w) * self.b[i].evaluate(w) == self.c[i].evaluate(w)
    }

    /// Index of the first row with `<a,w> * <b,w> != <c,w>`, if any.
    pub fn first_unsatisfied(&self, w: &[F]) -> Result<Option<usize>, R1csError> {
        if w.len() != self.num_wires {
            return Err(R1csError::Dimension {
                expected: self.num_wires,
                got: w.len(),
            });
        }
        Ok((0..self.num_constraints()).find(|&i| !self.row_holds(i, w)))
    }

    pub fn is_satisfied(&self, w: &[F]) -> Result<bool, R1csError> {
        Ok(self.first_unsatisfied(w)?.is_none())
    }

    /// Like [`ConstraintSystem::is_satisfied`], but names the failing row.
    pub fn check(&self, w: &[F]) -> Result<(), R1csError> {
        match self.first_unsatisfied(w)? {
            None => Ok(()),
            Some(row) => Err(R1csError::Unsatisfied {
                row,
                label: self.row_labels[row].clone(),
            }),
        }
    }

    /// Solves every computed wire from the input assignment and checks the
    /// result. Never returns an unsatisfying witness.
    pub fn generate_witness(&self, inputs: &Assignment<F>) -> Result<Witness<F>, R1csError> {
        let w = self.solve(inputs, &Assignment::new())?;
        self.check(w.values())?;
        Ok(w)
    }

    /// Solves the wires like [`ConstraintSystem::generate_witness`] but
    /// replaces the value of every computed wire whose label appears in
    /// `overrides`; later solvers see the replaced value. The result is not
    /// checked, which makes this the tool for probing soundness.
    pub fn solve(&self, inputs: &Assignment<F>, overrides: &Assignment<F>) -> Result<Witness<F>, R1csError> {
        let program = self.program.as_ref().ok_or(R1csError::NoWitnessProgram)?;
        let mut values: Vec<F> = Vec::with_capacity(program.wires.len());
        for wire in &program.wires {
            let v = match &wire.source {
                Source::One => F::one(),
                Source::Input => inputs
                    .get(&wire.label)
                    .ok_or_else(|| R1csError::MissingInput(wire.label.clone()))?,
                Source::Computed(solver) => match overrides.get(&wire.label) {
                    Some(v) => v,
                    None => solver(&Values { values: &values }).map_err(|reason| R1csError::Solver {
                        label: wire.label.clone(),
                        reason,
                    })?,
                },
            };
            values.push(v);
        }
        let mut out = vec![F::zero(); values.len()];
        for (j, v) in values.into_iter().enumerate() {
            out[program.perm[j]] = v;
        }
        Ok(Witness::new(out, self.num_public))
    }

    /// Whether the system carries solver closures.
    pub fn has_witness_program(&self) -> bool {
        self.program.is_some()
    }
}
