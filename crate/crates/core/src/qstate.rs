//! Superpositions of models, branch-controlled group actions, quantum
//! reference frame changes and entanglement diagnostics.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::model::{Model, ModelSpace, OrbitLabel, Section};

pub const NORM_TOLERANCE: f64 = 1e-9;
pub const PRUNE_THRESHOLD: f64 = 1e-12;
pub const EIGEN_FLOOR: f64 = 1e-12;
pub const MAX_BASIS: usize = 1 << 24;

/// What to do with entries that share an orbit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitPolicy {
    /// Same-orbit superpositions carry no physical meaning; refuse them.
    #[default]
    RejectSameOrbit,
    /// Keep them; identical models are merged by adding amplitudes.
    Permissive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub amplitude: Complex64,
    pub model: Model,
    orbit: OrbitLabel,
}

impl Branch {
    pub fn orbit(&self) -> &OrbitLabel {
        &self.orbit
    }
}

/// A normalised superposition of models, branches sorted by orbit label.
#[derive(Clone, Debug)]
pub struct BranchState {
    space: ModelSpace,
    branches: Vec<Branch>,
    policy: OrbitPolicy,
}

impl BranchState {
    pub fn superpose(
        space: &ModelSpace,
        entries: impl IntoIterator<Item = (Complex64, Model)>,
        policy: OrbitPolicy,
    ) -> Result<Self> {
        let mut entries: Vec<(usize, Complex64, Model)> =
            entries.into_iter().enumerate().map(|(i, (a, m))| (i, a, m)).collect();
        if entries.is_empty() {
            return Err(Error::Empty);
        }
        for (_, a, m) in &entries {
            space.validate(m)?;
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::InvalidModel(format!("non-finite amplitude {a}")));
            }
        }
        if policy == OrbitPolicy::Permissive {
            let mut merged: BTreeMap<Model, (usize, Complex64)> = BTreeMap::new();
            for (i, a, m) in entries {
                merged.entry(m).and_modify(|e| e.1 += a).or_insert((i, a));
            }
            entries = merged.into_iter().map(|(m, (i, a))| (i, a, m)).collect();
        }
        let norm = entries.iter().map(|(_, a, _)| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        entries.retain(|(_, a, _)| (a / norm).norm() > PRUNE_THRESHOLD);
        if entries.is_empty() {
            return Err(Error::ZeroNorm);
        }
        let norm = entries.iter().map(|(_, a, _)| a.norm_sqr()).sum::<f64>().sqrt();

        let mut branches = Vec::with_capacity(entries.len());
        let mut origin: BTreeMap<OrbitLabel, usize> = BTreeMap::new();
        for (i, a, model) in entries {
            let orbit = space.orbit_label(&model)?;
            if policy == OrbitPolicy::RejectSameOrbit {
                if let Some(&first) = origin.get(&orbit) {
                    return Err(Error::SameOrbit { first, second: i });
                }
                origin.insert(orbit.clone(), i);
            }
            branches.push(Branch { amplitude: a / norm, model, orbit });
        }
        branches.sort_by(|a, b| (&a.orbit, &a.model).cmp(&(&b.orbit, &b.model)));
        Ok(BranchState { space: space.clone(), branches, policy })
    }

    pub fn space(&self) -> &ModelSpace {
        &self.space
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn policy(&self) -> OrbitPolicy {
        self.policy
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.branches.iter().map(|b| b.amplitude.norm_sqr()).sum()
    }

    /// Acts on each branch with the element the selector assigns to its
    /// orbit. Amplitudes and orbit labels are untouched.
    pub fn controlled_transform<F>(&self, selector: F) -> Result<Self>
    where
        F: Fn(&OrbitLabel) -> Option<GroupElement>,
    {
        let mut branches = Vec::with_capacity(self.branches.len());
        for (i, b) in self.branches.iter().enumerate() {
            let g = selector(&b.orbit).ok_or(Error::SelectorUndefined { branch: i })?;
            branches.push(Branch {
                amplitude: b.amplitude,
                model: self.space.act(g, &b.model)?,
                orbit: b.orbit.clone(),
            });
        }
        branches.sort_by(|a, b| (&a.orbit, &a.model).cmp(&(&b.orbit, &b.model)));
        Ok(BranchState { space: self.space.clone(), branches, policy: self.policy })
    }

    /// The same element in every branch: an ordinary, classical transformation.
    pub fn transform_all(&self, g: GroupElement) -> Result<Self> {
        self.controlled_transform(|_| Some(g))
    }

    /// Changes the reference frame from `old` to `new`.
    ///
    /// Every branch must lie on `old`. Each branch is moved by the
    /// orbit-dependent convention change, so the result lies on `new`.
    pub fn qrf_change(&self, old: &Section, new: &Section) -> Result<Self> {
        let mut selector = BTreeMap::new();
        for (i, b) in self.branches.iter().enumerate() {
            if self.space.representative(old, &b.orbit)? != b.model {
                return Err(Error::NotOnSection { branch: i, section: old.name.clone() });
            }
            selector.insert(b.orbit.clone(), self.space.convention_change(old, new, &b.orbit)?);
        }
        self.controlled_transform(|o| selector.get(o).copied())
    }

    /// Whether every branch lies on `section`.
    pub fn lies_on(&self, section: &Section) -> Result<bool> {
        for b in &self.branches {
            if self.space.representative(section, &b.orbit)? != b.model {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True iff `subsystem` has the same configuration in every branch, so
    /// the state is a product of that configuration with the rest.
    pub fn frame_factorizes(&self, subsystem: usize) -> bool {
        let mut configs = self.branches.iter().map(|b| b.model.configs().get(subsystem));
        match configs.next() {
            Some(Some(first)) => configs.all(|c| c == Some(first)),
            _ => false,
        }
    }

    /// Index of a model in the tensor-product basis, subsystem 0 most significant.
    pub fn basis_index(&self, m: &Model) -> Result<usize> {
        self.basis_dimension()?;
        let d = self.space.config_space().size();
        Ok(m.configs().iter().fold(0, |acc, &x| acc * d + x))
    }

    pub fn basis_dimension(&self) -> Result<usize> {
        let d = self.space.config_space().size() as u128;
        let dim = d.pow(self.space.subsystems() as u32);
        if dim > MAX_BASIS as u128 {
            return Err(Error::DimensionOverflow { dimension: dim, limit: MAX_BASIS });
        }
        Ok(dim as usize)
    }

    /// Amplitude vector over the full configuration basis.
    pub fn embed_vector(&self) -> Result<Vec<Complex64>> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.basis_dimension()?];
        for b in &self.branches {
            v[self.basis_index(&b.model)?] += b.amplitude;
        }
        Ok(v)
    }

    /// Reduced density matrix of `subsystems`, on the span of the
    /// subsystem configurations that actually occur.
    pub fn reduced_density_matrix(&self, subsystems: &[usize]) -> Result<DensityMatrix> {
        let n = self.space.subsystems();
        let mut keep = vec![false; n];
        for &s in subsystems {
            if s >= n {
                return Err(Error::InvalidBipartition(format!("subsystem {s} out of range 0..{n}")));
            }
            if std::mem::replace(&mut keep[s], true) {
                return Err(Error::InvalidBipartition(format!("subsystem {s} listed twice")));
            }
        }
        if subsystems.is_empty() || subsystems.len() == n {
            return Err(Error::InvalidBipartition("subset must be non-empty and proper".into()));
        }
        let split = |m: &Model| -> (Vec<usize>, Vec<usize>) {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for (s, &x) in m.configs().iter().enumerate() {
                if keep[s] { a.push(x) } else { b.push(x) }
            }
            (a, b)
        };
        let mut basis: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut by_rest: BTreeMap<Vec<usize>, Vec<(Vec<usize>, Complex64)>> = BTreeMap::new();
        for b in &self.branches {
            let (kept, rest) = split(&b.model);
            basis.entry(kept.clone()).or_insert(0);
            by_rest.entry(rest).or_default().push((kept, b.amplitude));
        }
        for (i, v) in basis.values_mut().enumerate() {
            *v = i;
        }
        let dim = basis.len();
        let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
        for group in by_rest.values() {
            for (ka, a) in group {
                for (kb, b) in group {
                    rho[(basis[ka], basis[kb])] += a * b.conj();
                }
            }
        }
        Ok(DensityMatrix { basis: basis.into_keys().collect(), entries: rho })
    }

    /// Von Neumann entropy in bits of the reduced state of `subsystems`.
    pub fn entanglement_entropy(&self, subsystems: &[usize]) -> Result<f64> {
        Ok(self.reduced_density_matrix(subsystems)?.von_neumann_entropy_bits())
    }

    /// Branchwise configuration and amplitude equality.
    pub fn approx_eq(&self, other: &BranchState, amplitude_tol: f64) -> bool {
        self.branches.len() == other.branches.len()
            && self.branches.iter().zip(&other.branches).all(|(a, b)| {
                a.model == b.model && (a.amplitude - b.amplitude).norm() <= amplitude_tol
            })
    }

    pub fn to_document(&self) -> StateDocument {
        StateDocument {
            branches: self
                .branches
                .iter()
                .map(|b| BranchRecord {
                    re: b.amplitude.re,
                    im: b.amplitude.im,
                    configuration: b.model.configs().to_vec(),
                })
                .collect(),
        }
    }

    pub fn from_document(space: &ModelSpace, doc: &StateDocument, policy: OrbitPolicy) -> Result<Self> {
        BranchState::superpose(
            space,
            doc.branches
                .iter()
                .map(|r| (Complex64::new(r.re, r.im), Model::new(r.configuration.clone()))),
            policy,
        )
    }
}

/// Serialized branch list: `(re, im, configuration)` triples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDocument {
    pub branches: Vec<BranchRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub re: f64,
    pub im: f64,
    pub configuration: Vec<usize>,
}

/// A density matrix with labelled basis states.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    basis: Vec<Vec<usize>>,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<usize>] {
        &self.basis
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dimension();
        (0..n).all(|i| (0..n).all(|j| (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm() <= tol))
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.entries.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Hermitian, unit trace and positive semidefinite within `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        self.is_hermitian(tol)
            && (self.trace() - Complex64::new(1.0, 0.0)).norm() <= tol
            && self.eigenvalues().iter().all(|&l| l >= -tol)
    }

    pub fn von_neumann_entropy_bits(&self) -> f64 {
        let s: f64 = self
            .eigenvalues()
            .into_iter()
            .filter(|&l| l > EIGEN_FLOOR)
            .map(|l| -l * l.log2())
            .sum();
        s.max(0.0)
    }
}
