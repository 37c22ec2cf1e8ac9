//! JSON algebra specification files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::algebra::OperatorAlgebra;
use crate::fixtures::columns;
use crate::linalg::{c64, unitarity_defect, CMatrix};

/// Largest ambient dimension accepted without `--allow-large`.
pub const MAX_DIM: usize = 64;

/// Complex matrix as rows of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub dim: usize,
    #[serde(flatten)]
    pub kind: SpecKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpecKind {
    /// The *-algebra generated by the matrices, or its commutant.
    Generators {
        generators: Vec<MatrixJson>,
        #[serde(default)]
        commutant: bool,
    },
    /// `U (⊕_J 1_{n_J} ⊗ L(C^{d_J})) U†` from `[n_J, d_J]` pairs.
    Structural {
        blocks: Vec<[usize; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        basis_change: Option<MatrixJson>,
    },
    /// Maximal abelian algebra diagonal in the columns of `unitary`.
    Masa {
        unitary: MatrixJson,
    },
    /// Operators on the sites of `region` (1-based).
    Lattice {
        site_dims: Vec<usize>,
        region: Vec<usize>,
    },
    Full,
    Trivial,
}

impl AlgebraSpec {
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            SpecKind::Generators { .. } => "generators",
            SpecKind::Structural { .. } => "structural",
            SpecKind::Masa { .. } => "masa",
            SpecKind::Lattice { .. } => "lattice",
            SpecKind::Full => "full",
            SpecKind::Trivial => "trivial",
        }
    }

    /// Checks the payload against `dim` and the size cap.
    pub fn validate(&self, allow_large: bool) -> Result<(), String> {
        let invalid = |field: &str, msg: String| Err(format!("field `{field}`: {msg}"));
        if self.dim == 0 {
            return invalid("dim", "must be positive".into());
        }
        if self.dim > MAX_DIM && !allow_large {
            return invalid(
                "dim",
                format!(
                    "{} exceeds the cap {MAX_DIM}; pass --allow-large to override",
                    self.dim
                ),
            );
        }
        match &self.kind {
            SpecKind::Generators { generators, .. } => {
                for (i, g) in generators.iter().enumerate() {
                    check_shape(g, self.dim)
                        .or_else(|m| invalid(&format!("generators[{i}]"), m))?;
                }
            }
            SpecKind::Structural {
                blocks,
                basis_change,
            } => {
                if blocks.is_empty() {
                    return invalid("blocks", "no blocks".into());
                }
                if let Some(i) = blocks.iter().position(|b| b[0] == 0 || b[1] == 0) {
                    return invalid(
                        &format!("blocks[{i}]"),
                        "n_J and d_J must be positive".into(),
                    );
                }
                let total: usize = blocks.iter().map(|b| b[0] * b[1]).sum();
                if total != self.dim {
                    return invalid(
                        "blocks",
                        format!("Σ n_J d_J = {total} differs from dim {}", self.dim),
                    );
                }
                if let Some(u) = basis_change {
                    check_unitary(u, self.dim).or_else(|m| invalid("basis_change", m))?;
                }
            }
            SpecKind::Masa { unitary } => {
                check_unitary(unitary, self.dim).or_else(|m| invalid("unitary", m))?;
            }
            SpecKind::Lattice { site_dims, region } => {
                if site_dims.is_empty() || site_dims.contains(&0) {
                    return invalid(
                        "site_dims",
                        "sites must be nonempty with positive dimensions".into(),
                    );
                }
                let total = site_dims
                    .iter()
                    .try_fold(1usize, |acc, &s| acc.checked_mul(s))
                    .unwrap_or(usize::MAX);
                if total != self.dim {
                    return invalid(
                        "site_dims",
                        format!("product {total} differs from dim {}", self.dim),
                    );
                }
                if let Some(&r) = region.iter().find(|&&r| r == 0 || r > site_dims.len()) {
                    return invalid(
                        "region",
                        format!("site {r} outside 1..={}", site_dims.len()),
                    );
                }
            }
            SpecKind::Full | SpecKind::Trivial => {}
        }
        Ok(())
    }

    pub fn build(&self) -> crate::Result<OperatorAlgebra> {
        let d = self.dim;
        match &self.kind {
            SpecKind::Generators {
                generators,
                commutant,
            } => {
                let gens: Vec<CMatrix> = generators.iter().map(to_matrix).collect();
                let a = OperatorAlgebra::from_generators(&gens, d)?;
                Ok(if *commutant { a.commutant() } else { a })
            }
            SpecKind::Structural {
                blocks,
                basis_change,
            } => {
                let pairs: Vec<(usize, usize)> = blocks.iter().map(|b| (b[0], b[1])).collect();
                let u = basis_change.as_ref().map(to_matrix);
                OperatorAlgebra::structural(&pairs, u.as_ref())
            }
            SpecKind::Masa { unitary } => OperatorAlgebra::masa(&columns(&to_matrix(unitary))),
            SpecKind::Lattice { site_dims, region } => {
                let zero_based: Vec<usize> = region.iter().map(|r| r - 1).collect();
                OperatorAlgebra::lattice(site_dims, &zero_based)
            }
            SpecKind::Full => OperatorAlgebra::full(d),
            SpecKind::Trivial => OperatorAlgebra::trivial(d),
        }
    }

    /// Basis columns of a MASA spec.
    pub fn masa_basis(&self) -> Option<Vec<crate::linalg::CVector>> {
        match &self.kind {
            SpecKind::Masa { unitary } => Some(columns(&to_matrix(unitary))),
            _ => None,
        }
    }
}

fn check_shape(m: &MatrixJson, d: usize) -> Result<(), String> {
    if m.len() != d || m.iter().any(|r| r.len() != d) {
        return Err(format!("expected a {d}x{d} matrix"));
    }
    if m.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err("non-finite entry".into());
    }
    Ok(())
}

fn check_unitary(m: &MatrixJson, d: usize) -> Result<(), String> {
    check_shape(m, d)?;
    let defect = unitarity_defect(&to_matrix(m));
    if defect > 1e-9 {
        return Err(format!("not unitary (defect {defect:.2e})"));
    }
    Ok(())
}

pub fn to_matrix(m: &MatrixJson) -> CMatrix {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    CMatrix::from_fn(rows, cols, |i, j| c64(m[i][j][0], m[i][j][1]))
}

pub fn from_matrix(m: &CMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn syntax(path: &Path, e: serde_json::Error) -> CliError {
    CliError::Syntax {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Reads and validates a spec file with the default size cap.
pub fn parse_spec(path: &Path) -> Result<AlgebraSpec, CliError> {
    parse_spec_with(path, false)
}

pub fn parse_spec_with(path: &Path, allow_large: bool) -> Result<AlgebraSpec, CliError> {
    let text = read(path)?;
    let spec: AlgebraSpec = serde_json::from_str(&text).map_err(|e| syntax(path, e))?;
    spec.validate(allow_large)
        .map_err(|message| CliError::Spec {
            path: path.display().to_string(),
            message,
        })?;
    Ok(spec)
}

/// Reads a unitary given either as a bare matrix or as `{"unitary": ...}`.
pub fn parse_unitary(path: &Path) -> Result<CMatrix, CliError> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum UnitaryFile {
        Bare(MatrixJson),
        Wrapped { unitary: MatrixJson },
    }
    let text = read(path)?;
    let m = match serde_json::from_str(&text).map_err(|e| syntax(path, e))? {
        UnitaryFile::Bare(m) | UnitaryFile::Wrapped { unitary: m } => m,
    };
    let spec_err = |message: String| CliError::Spec {
        path: path.display().to_string(),
        message,
    };
    let d = m.len();
    check_unitary(&m, d).map_err(|msg| spec_err(format!("field `unitary`: {msg}")))?;
    Ok(to_matrix(&m))
}
