//! Star-graph data model and the vertex transparency sum rules.
//!
//! Bonds are numbered from 1 in every public function, matching the usual
//! physics labelling `j = 1..N`. Storage is 0-based.

use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::specfun::sqrt_e_minus_v;

/// Potential on a single bond, with `x` measured from the central vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    Constant {
        value: f64,
    },
    /// `V(x) = omega^2 x^2 / 2`.
    Harmonic {
        omega: f64,
    },
}

impl PotentialSpec {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            PotentialSpec::Zero => 0.0,
            PotentialSpec::Constant { value } => value,
            PotentialSpec::Harmonic { omega } => 0.5 * omega * omega * x * x,
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            PotentialSpec::Zero | PotentialSpec::Constant { .. } => 0.0,
            PotentialSpec::Harmonic { omega } => omega * omega * x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            PotentialSpec::Zero => true,
            PotentialSpec::Constant { value } => value == 0.0,
            PotentialSpec::Harmonic { .. } => false,
        }
    }

    fn validate(&self, bond: usize) -> Result<()> {
        match *self {
            PotentialSpec::Zero => Ok(()),
            PotentialSpec::Constant { value } if value.is_finite() => Ok(()),
            PotentialSpec::Constant { value } => Err(Error::InvalidBond {
                bond,
                reason: format!("constant potential {value} is not finite"),
            }),
            PotentialSpec::Harmonic { omega } if omega.is_finite() && omega > 0.0 => Ok(()),
            PotentialSpec::Harmonic { omega } => Err(Error::InvalidBond {
                bond,
                reason: format!("harmonic potential needs omega > 0, got {omega}"),
            }),
        }
    }
}

/// Length of a bond. Semi-infinite leads are only meaningful for scattering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BondLength {
    Finite(f64),
    Unbounded,
}

impl BondLength {
    pub fn finite(&self) -> Option<f64> {
        match *self {
            BondLength::Finite(l) => Some(l),
            BondLength::Unbounded => None,
        }
    }
}

impl From<f64> for BondLength {
    fn from(l: f64) -> Self {
        if l == f64::INFINITY {
            BondLength::Unbounded
        } else {
            BondLength::Finite(l)
        }
    }
}

impl fmt::Display for BondLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BondLength::Finite(l) => write!(f, "{l}"),
            BondLength::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for BondLength {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            BondLength::Finite(l) => s.serialize_f64(l),
            BondLength::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for BondLength {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct LengthVisitor;

        impl Visitor<'_> for LengthVisitor {
            type Value = BondLength;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a bond length or \"unbounded\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<BondLength, E> {
                Ok(BondLength::Finite(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<BondLength, E> {
                Ok(BondLength::Finite(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<BondLength, E> {
                Ok(BondLength::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<BondLength, E> {
                match v {
                    "unbounded" | "inf" | "infinity" => Ok(BondLength::Unbounded),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }

        d.deserialize_any(LengthVisitor)
    }
}

/// A star graph: `N` bonds meeting at one central vertex with weighted
/// continuity `alpha_1 psi_1(0) = ... = alpha_N psi_N(0)` and the weighted
/// Kirchhoff rule `sum_j psi_j'(0) / alpha_j = 0`.
///
/// Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarGraph {
    lengths: Vec<BondLength>,
    alphas: Vec<f64>,
    potentials: Vec<PotentialSpec>,
}

/// Validates the bond lists and assembles a [`StarGraph`].
pub fn build_star(
    lengths: Vec<BondLength>,
    alphas: Vec<f64>,
    potentials: Vec<PotentialSpec>,
) -> Result<StarGraph> {
    let n = alphas.len();
    if lengths.len() != n || potentials.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} lengths, {} alphas, {} potentials",
            lengths.len(),
            n,
            potentials.len()
        )));
    }
    if n < 2 {
        return Err(Error::DimensionMismatch(format!(
            "a star graph needs at least 2 bonds, got {n}"
        )));
    }
    for (idx, &a) in alphas.iter().enumerate() {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::InvalidBond {
                bond: idx + 1,
                reason: format!("alpha must be finite and non-zero, got {a}"),
            });
        }
    }
    for (idx, l) in lengths.iter().enumerate() {
        if let BondLength::Finite(l) = *l {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidBond {
                    bond: idx + 1,
                    reason: format!("length must be positive, got {l}"),
                });
            }
        }
    }
    for (idx, p) in potentials.iter().enumerate() {
        p.validate(idx + 1)?;
    }
    Ok(StarGraph {
        lengths,
        alphas,
        potentials,
    })
}

impl StarGraph {
    /// Finite bonds with the given lengths and weights and no potential.
    pub fn undriven(lengths: &[f64], alphas: &[f64]) -> Result<Self> {
        build_star(
            lengths.iter().map(|&l| BondLength::Finite(l)).collect(),
            alphas.to_vec(),
            vec![PotentialSpec::Zero; alphas.len()],
        )
    }

    /// Semi-infinite leads with the given weights and potentials.
    pub fn leads(alphas: &[f64], potentials: &[PotentialSpec]) -> Result<Self> {
        build_star(
            vec![BondLength::Unbounded; alphas.len()],
            alphas.to_vec(),
            potentials.to_vec(),
        )
    }

    pub fn n_bonds(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn lengths(&self) -> &[BondLength] {
        &self.lengths
    }

    pub fn potentials(&self) -> &[PotentialSpec] {
        &self.potentials
    }

    /// All lengths if every bond is finite.
    pub fn finite_lengths(&self) -> Option<Vec<f64>> {
        self.lengths.iter().map(BondLength::finite).collect()
    }

    pub fn is_undriven(&self) -> bool {
        self.potentials.iter().all(PotentialSpec::is_zero)
    }

    /// Potential values at the central vertex.
    pub fn vertex_potentials(&self) -> Vec<f64> {
        self.potentials.iter().map(|p| p.value(0.0)).collect()
    }

    /// Converts a 1-based bond index into a storage index.
    pub fn bond_index(&self, bond: usize) -> Result<usize> {
        if bond == 0 || bond > self.n_bonds() {
            Err(Error::IndexOutOfRange {
                index: bond,
                n_bonds: self.n_bonds(),
            })
        } else {
            Ok(bond - 1)
        }
    }

    /// Parses the JSON graph description.
    pub fn from_json(text: &str) -> Result<Self> {
        GraphFile::from_json(text)?.into_graph()
    }

    pub fn to_graph_file(&self) -> GraphFile {
        GraphFile {
            lengths: Some(self.lengths.clone()),
            alphas: self.alphas.clone(),
            potentials: Some(self.potentials.clone()),
        }
    }
}

/// On-disk graph description:
///
/// ```json
/// { "lengths": [5.1, 4.3, 3.5], "alphas": [2.4, 3, 4],
///   "potentials": [{"kind": "zero"}, {"kind": "harmonic", "omega": 1.0}, {"kind": "constant", "value": 0.5}] }
/// ```
///
/// `lengths` may be omitted (all bonds unbounded) or contain `"unbounded"`;
/// `potentials` may be omitted (all zero).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<BondLength>>,
    pub alphas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potentials: Option<Vec<PotentialSpec>>,
}

impl GraphFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::GraphFile(e.to_string()))
    }

    pub fn into_graph(self) -> Result<StarGraph> {
        let n = self.alphas.len();
        let lengths = self
            .lengths
            .unwrap_or_else(|| vec![BondLength::Unbounded; n]);
        let potentials = self
            .potentials
            .unwrap_or_else(|| vec![PotentialSpec::Zero; n]);
        build_star(lengths, self.alphas, potentials)
    }
}

/// `1/alpha_i^2 - sum_{j != i} 1/alpha_j^2`; zero iff an undriven vertex is
/// reflectionless for waves arriving on bond `i`.
pub fn sum_rule_residual(g: &StarGraph, bond: usize) -> Result<f64> {
    let i = g.bond_index(bond)?;
    let a = g.alphas();
    let mut r = 1.0 / (a[i] * a[i]);
    for (j, &aj) in a.iter().enumerate() {
        if j != i {
            r -= 1.0 / (aj * aj);
        }
    }
    Ok(r)
}

/// `sum_{j <= m} 1/alpha_j^2 - sum_{j > m} 1/alpha_j^2` for `m` incoming
/// bonds labelled first.
pub fn generalized_sum_rule_residual(alphas: &[f64], m: usize) -> Result<f64> {
    let n = alphas.len();
    if n < 2 {
        return Err(Error::DimensionMismatch(format!(
            "a star graph needs at least 2 bonds, got {n}"
        )));
    }
    if m == 0 || m >= n {
        return Err(Error::InvalidParameter(format!(
            "incoming bond count must satisfy 1 <= M < {n}, got {m}"
        )));
    }
    if let Some(j) = alphas.iter().position(|&a| a == 0.0 || !a.is_finite()) {
        return Err(Error::InvalidBond {
            bond: j + 1,
            reason: format!("alpha must be finite and non-zero, got {}", alphas[j]),
        });
    }
    let mut r = 0.0;
    for &a in &alphas[..m] {
        r += 1.0 / (a * a);
    }
    for &a in &alphas[m..] {
        r -= 1.0 / (a * a);
    }
    Ok(r)
}

/// Energy-dependent sum rule for driven leads,
/// `sqrt(k^2 - V_i(0))/alpha_i^2 - sum_{j != i} sqrt(k^2 - V_j(0))/alpha_j^2`,
/// with principal square roots.
pub fn driven_sum_rule_residual(g: &StarGraph, k: f64, bond: usize) -> Result<Complex64> {
    let i = g.bond_index(bond)?;
    if !k.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "k must be finite, got {k}"
        )));
    }
    let k2 = k * k;
    let term = |j: usize| {
        let a = g.alphas()[j];
        sqrt_e_minus_v(k2, g.potentials()[j].value(0.0)) / (a * a)
    };
    let mut r = term(i);
    for j in (0..g.n_bonds()).filter(|&j| j != i) {
        r -= term(j);
    }
    Ok(r)
}
