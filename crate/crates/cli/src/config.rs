//! Declarative fibration-context configuration (TOML, `schema = 1`).

use std::sync::Arc;

use fmgroups::abelian::{AbelianContext, EndContext, ReprRing, SquareMat};
use fmgroups::genus1::WeierstrassContext;
use fmgroups::groups::{fano_group, FGAbelian, FiniteGroup, GroupHom, SemidirectContext};
use fmgroups::Int;
use serde::Deserialize;

use crate::CliError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema: u32,
    kind: String,
    pic: Option<RawPic>,
    aut: Option<RawAut>,
    end: Option<RawEnd>,
    sections: Option<RawGroup>,
    dual_sections: Option<RawGroup>,
    pic_t: Option<RawGroup>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    free_rank: usize,
    #[serde(default)]
    torsion: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPic {
    free_rank: usize,
    #[serde(default)]
    torsion: Vec<String>,
    /// coordinate indices spanning the designated base summand
    #[serde(default)]
    base_summand: Vec<usize>,
    /// fibre degree of each Pic generator, as one row vector
    deg_t: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAut {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    /// one Pic endomorphism matrix per label, row-major decimal strings
    action: Vec<RawMatrix>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    matrix: Vec<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnd {
    mode: String,
    dim: Option<usize>,
    conj: Option<Vec<Vec<String>>>,
    #[serde(default)]
    generators: Vec<RawNamedMatrix>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNamedMatrix {
    name: String,
    matrix: Vec<Vec<String>>,
}

/// A fully validated context, ready for the subcommands.
pub enum LoadedConfig {
    Weierstrass(Arc<WeierstrassContext>),
    Abelian(Arc<AbelianContext>),
    Fano {
        group: SemidirectContext,
        /// position of the shift coordinate inside the module elements
        shift_pos: usize,
        pic_len: usize,
    },
}

fn parse_int(s: &str) -> Result<Int, CliError> {
    s.parse::<Int>()
        .map_err(|_| CliError::Malformed(format!("invalid integer {s:?}")))
}

fn parse_rows(rows: &[Vec<String>]) -> Result<Vec<Vec<Int>>, CliError> {
    rows.iter()
        .map(|r| r.iter().map(|s| parse_int(s)).collect())
        .collect()
}

fn parse_group(raw: &RawGroup) -> Result<FGAbelian, CliError> {
    let torsion = raw
        .torsion
        .iter()
        .map(|s| parse_int(s))
        .collect::<Result<Vec<_>, _>>()?;
    FGAbelian::new(raw.free_rank, torsion)
        .map_err(|e| CliError::Malformed(format!("invalid group description: {e}")))
}

fn parse_aut(
    raw: Option<&RawAut>,
    pic: &FGAbelian,
) -> Result<(FiniteGroup, Vec<GroupHom>), CliError> {
    match raw {
        None => Ok((
            FiniteGroup::trivial(),
            vec![GroupHom::identity(pic.clone())],
        )),
        Some(a) => {
            let aut = FiniteGroup::new(a.labels.clone(), a.table.clone())
                .map_err(|e| CliError::Malformed(format!("invalid automorphism table: {e}")))?;
            let action = a
                .action
                .iter()
                .map(|m| {
                    GroupHom::new(pic.clone(), pic.clone(), parse_rows(&m.matrix)?).map_err(|e| {
                        CliError::Malformed(format!("invalid Pic action matrix: {e}"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok((aut, action))
        }
    }
}

fn parse_end(raw: Option<&RawEnd>) -> Result<EndContext, CliError> {
    let raw = match raw {
        None => return Ok(EndContext::IntegerPp),
        Some(r) => r,
    };
    match raw.mode.as_str() {
        "integer-pp" => Ok(EndContext::IntegerPp),
        "represented" => {
            let dim = raw
                .dim
                .ok_or_else(|| CliError::Malformed("represented mode requires dim".into()))?;
            let conj_rows = raw
                .conj
                .as_ref()
                .ok_or_else(|| CliError::Malformed("represented mode requires conj".into()))?;
            let conj = SquareMat::new(parse_rows(conj_rows)?)
                .map_err(|e| CliError::Malformed(e.to_string()))?;
            let generators = raw
                .generators
                .iter()
                .map(|g| {
                    Ok((
                        g.name.clone(),
                        SquareMat::new(parse_rows(&g.matrix)?)
                            .map_err(|e| CliError::Malformed(e.to_string()))?,
                    ))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let ring = ReprRing::new(dim, generators, conj)
                .map_err(|e| CliError::Malformed(format!("invalid endomorphism context: {e}")))?;
            Ok(EndContext::Represented(ring))
        }
        other => Err(CliError::Malformed(format!(
            "unknown endomorphism mode {other:?}"
        ))),
    }
}

pub fn load(path: &str) -> Result<LoadedConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Malformed(format!("cannot read config {path:?}: {e}")))?;
    let raw: RawConfig = toml::from_str(&text)
        .map_err(|e| CliError::Malformed(format!("invalid config: {e}")))?;
    if raw.schema != 1 {
        return Err(CliError::Malformed(format!(
            "unsupported config schema {}",
            raw.schema
        )));
    }
    match raw.kind.as_str() {
        "weierstrass" => {
            let rp = raw
                .pic
                .as_ref()
                .ok_or_else(|| CliError::Malformed("weierstrass config requires [pic]".into()))?;
            let pic = parse_group(&RawGroup {
                free_rank: rp.free_rank,
                torsion: rp.torsion.clone(),
            })?;
            let deg_row = rp.deg_t.as_ref().ok_or_else(|| {
                CliError::Malformed("weierstrass config requires pic.deg_t".into())
            })?;
            let deg_t = GroupHom::new(
                pic.clone(),
                FGAbelian::free(1),
                vec![deg_row
                    .iter()
                    .map(|s| parse_int(s))
                    .collect::<Result<Vec<_>, _>>()?],
            )
            .map_err(|e| CliError::Malformed(format!("invalid fibre-degree map: {e}")))?;
            let (aut, action) = parse_aut(raw.aut.as_ref(), &pic)?;
            WeierstrassContext::new(pic, deg_t, rp.base_summand.clone(), aut, action)
                .map(LoadedConfig::Weierstrass)
                .map_err(|e| CliError::Malformed(format!("invalid config: {e}")))
        }
        "abelian" => {
            let end = parse_end(raw.end.as_ref())?;
            let empty = RawGroup {
                free_rank: 0,
                torsion: Vec::new(),
            };
            let sections = parse_group(raw.sections.as_ref().unwrap_or(&empty))?;
            let dual_sections = parse_group(raw.dual_sections.as_ref().unwrap_or(&empty))?;
            let pic_t = parse_group(raw.pic_t.as_ref().unwrap_or(&empty))?;
            Ok(LoadedConfig::Abelian(AbelianContext::new(
                end,
                sections,
                dual_sections,
                pic_t,
            )))
        }
        "fano" => {
            let rp = raw
                .pic
                .as_ref()
                .ok_or_else(|| CliError::Malformed("fano config requires [pic]".into()))?;
            let pic = parse_group(&RawGroup {
                free_rank: rp.free_rank,
                torsion: rp.torsion.clone(),
            })?;
            let (aut, action) = parse_aut(raw.aut.as_ref(), &pic)?;
            let shift_pos = pic.free_rank();
            let pic_len = pic.len();
            let group = fano_group(aut, pic, action)
                .map_err(|e| CliError::Malformed(format!("invalid config: {e}")))?;
            Ok(LoadedConfig::Fano {
                group,
                shift_pos,
                pic_len,
            })
        }
        other => Err(CliError::Malformed(format!(
            "unknown fibration kind {other:?}"
        ))),
    }
}
