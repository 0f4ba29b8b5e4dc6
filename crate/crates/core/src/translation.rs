//! Rigid translations on a periodic lattice: the probe/mass two-body
//! scenario and the three-particle subsystem-mixing example.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Model, ModelSpace, Section};
use crate::qstate::{BranchState, OrbitPolicy, NORM_TOLERANCE};

/// Subsystem index of the probe particle P.
pub const PROBE: usize = 0;
/// Subsystem index of the massive object M.
pub const MASS: usize = 1;

pub const DEFAULT_LATTICE: usize = 16;

/// A probe P and a mass M on Zₙ, with M a distance `separation` to the left
/// (amplitude `alpha`) or right (amplitude `beta`) of P.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslationScenario {
    pub lattice_size: usize,
    pub particle_count: usize,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub separation: usize,
}

impl TranslationScenario {
    pub fn new(lattice_size: usize, alpha: Complex64, beta: Complex64, separation: usize) -> Result<Self> {
        let sc = TranslationScenario { lattice_size, particle_count: 2, alpha, beta, separation };
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.lattice_size < 4 {
            return bad(format!("lattice size {} < 4", self.lattice_size));
        }
        if self.particle_count != 2 {
            return bad(format!("two-body scenario with {} particles", self.particle_count));
        }
        let norm = self.alpha.norm_sqr() + self.beta.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return bad(format!("|alpha|^2 + |beta|^2 = {norm}, expected 1"));
        }
        // 0 < a < n/2 keeps the two branches on distinct orbits
        if self.separation == 0 || 2 * self.separation >= self.lattice_size {
            return bad(format!(
                "separation {} outside (0, {}/2)",
                self.separation, self.lattice_size
            ));
        }
        Ok(())
    }

    pub fn space(&self) -> Result<ModelSpace> {
        ModelSpace::translations(self.lattice_size, 2)
    }

    fn left(&self) -> usize {
        self.lattice_size - self.separation
    }
}

/// The state relative to the probe: P at 0, M at −a (α) and +a (β).
pub fn build_earth_particle(sc: &TranslationScenario) -> Result<BranchState> {
    sc.validate()?;
    let space = sc.space()?;
    BranchState::superpose(
        &space,
        [
            (sc.alpha, space.model([0, sc.left()])?),
            (sc.beta, space.model([0, sc.separation])?),
        ],
        OrbitPolicy::RejectSameOrbit,
    )
}

/// Changes a probe-frame state into the frame of the mass.
pub fn to_mass_frame(st: &BranchState, sc: &TranslationScenario) -> Result<BranchState> {
    sc.validate()?;
    if st.space().subsystems() != 2 || st.space().config_space().size() != sc.lattice_size {
        return Err(Error::InvalidScenario("state does not match the scenario lattice".into()));
    }
    st.qrf_change(&Section::frame_of(PROBE), &Section::frame_of(MASS))
}

/// The mass-frame state written down directly: M at 0, P at +a (α) and −a (β).
pub fn mass_frame_direct(sc: &TranslationScenario) -> Result<BranchState> {
    sc.validate()?;
    let space = sc.space()?;
    BranchState::superpose(
        &space,
        [
            (sc.alpha, space.model([sc.separation, 0])?),
            (sc.beta, space.model([sc.left(), 0])?),
        ],
        OrbitPolicy::RejectSameOrbit,
    )
}

/// Maps a residue mod n into (−n/2, n/2].
pub fn signed_residue(x: i64, n: usize) -> i64 {
    let n = n as i64;
    let r = x.rem_euclid(n);
    if 2 * r > n {
        r - n
    } else {
        r
    }
}

/// `xᵢ − xⱼ` on Zₙ, represented in (−n/2, n/2]. Constant along orbits.
pub fn relative_distance(n: usize, m: &Model, i: usize, j: usize) -> i64 {
    signed_residue(m.config(i) as i64 - m.config(j) as i64, n)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchPositions {
    pub branch: usize,
    pub amplitude: [f64; 2],
    /// Signed positions of particles 1, 2, 3 relative to the frame particle.
    pub positions: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    /// 1-based label of the frame particle.
    pub frame: usize,
    pub branches: Vec<BranchPositions>,
    /// Whether each particle's configuration is the same in every branch.
    pub factorizes: Vec<bool>,
    /// 1-based label of the subsystem whose reduced state is measured.
    pub entropy_subsystem: usize,
    /// Entanglement between the two non-frame particles, in bits.
    pub entropy_bits: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreeParticleReport {
    pub lattice_size: usize,
    pub frames: Vec<FrameReport>,
}

/// Describes a two-branch, three-particle state from the frames of
/// particles 1 and 2. `positions[b]` holds (q₁, q₂, q₃) in branch `b`;
/// q₁ must agree across branches.
pub fn three_particle_report(
    lattice_size: usize,
    positions: [[usize; 3]; 2],
    alpha: Complex64,
    beta: Complex64,
) -> Result<ThreeParticleReport> {
    if positions[0][0] != positions[1][0] {
        return Err(Error::InvalidScenario("particle 1 differs across branches".into()));
    }
    let space = ModelSpace::translations(lattice_size, 3)?;
    let shift = space.group().inverse(space.group().element(positions[0][0] % lattice_size)?)?;
    let mut entries = Vec::with_capacity(2);
    for (amp, q) in [alpha, beta].into_iter().zip(positions) {
        entries.push((amp, space.act(shift, &space.model(q)?)?));
    }
    let frame1 = BranchState::superpose(&space, entries, OrbitPolicy::RejectSameOrbit)?;
    let frame2 = frame1.qrf_change(&Section::frame_of(0), &Section::frame_of(1))?;

    let describe = |frame: usize, st: &BranchState| -> Result<FrameReport> {
        let others: Vec<usize> = (0..3).filter(|&s| s != frame).collect();
        let entropy = st.entanglement_entropy(&others[..1])?;
        Ok(FrameReport {
            frame: frame + 1,
            branches: st
                .branches()
                .iter()
                .enumerate()
                .map(|(b, br)| BranchPositions {
                    branch: b,
                    amplitude: [br.amplitude.re, br.amplitude.im],
                    positions: br.model.configs().iter().map(|&x| signed_residue(x as i64, lattice_size)).collect(),
                })
                .collect(),
            factorizes: (0..3).map(|s| st.frame_factorizes(s)).collect(),
            entropy_subsystem: others[0] + 1,
            entropy_bits: entropy,
        })
    };
    Ok(ThreeParticleReport { lattice_size, frames: vec![describe(0, &frame1)?, describe(1, &frame2)?] })
}
