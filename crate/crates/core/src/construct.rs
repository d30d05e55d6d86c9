//! Building the dense group of a parameter set.
//!
//! J, H, K and G families are enumerated from their presentations. H3 and K3
//! are quotients of J3 by its first and second centre. When a presentation
//! defeats the enumerator within the coset limit, the fundamental relation of
//! the case is added as an extra relator; the result is a quotient of the
//! group, and it is accepted only when its order equals the known order.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::enumerate::{regular_table, EnumLimits};
use crate::error::{Error, Result};
use crate::group::DenseGroup;
use crate::params::{classify, expected_order, is_prime, Case, Family, FamilyParams};
use crate::presentations::{presentation, Presentation, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildConfig {
    pub limits: EnumLimits,
    pub dense_cap: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            limits: EnumLimits::default(),
            dense_cap: crate::group::DEFAULT_CAP,
        }
    }
}

/// How a group was obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    Enumerated,
    /// Enumerated with extra relators that hold in the group; the order matched
    /// the known order.
    Augmented { relators: Vec<String> },
    /// Quotient of a J group by a term of its upper central series.
    Quotient { of: String, term: usize },
}

#[derive(Debug, Clone)]
pub struct Constructed {
    pub params: FamilyParams,
    pub group: DenseGroup,
    /// The defining presentation (none for H3, K3).
    pub presentation: Option<Presentation>,
    pub method: Method,
}

/// `x^k y^k` for the fundamental relation `A^k B^k = 1` of the case.
pub fn fundamental_relator(params: &FamilyParams) -> Option<Word> {
    let k = match params.case? {
        Case::Case1 => params.pm() * params.pm(),
        Case::Case2 => {
            let c = params.case2()?;
            2 * c.u
        }
        Case::Case3 => 27,
    };
    Some(Word::from_syllables(vec![(0, k), (1, k)]))
}

/// For β − 1 = ±p^m, the J group of the same α, which is then all of G(β).
pub fn macdonald_as_j(beta: i64) -> Option<FamilyParams> {
    let d = beta.checked_sub(1)?;
    if d == 0 {
        return None;
    }
    let a = d.unsigned_abs();
    let p = (2..=a).find(|q| a % q == 0)?;
    if !is_prime(p) {
        return None;
    }
    let mut m = 0u32;
    let mut r = a;
    while r % p == 0 {
        r /= p;
        m += 1;
    }
    if r != 1 {
        return None;
    }
    let ell = d.signum();
    let family = match classify(p, m, ell).ok()? {
        Case::Case1 => Family::J1,
        Case::Case2 => Family::J2,
        Case::Case3 => Family::J3,
    };
    FamilyParams::new(family, p, m, ell).ok()
}

fn dense_from(pres: &Presentation, cfg: &BuildConfig) -> Result<DenseGroup> {
    let t = regular_table(pres, cfg.limits)?;
    DenseGroup::from_regular_table(&t, cfg.dense_cap)
}

fn retryable(e: &Error) -> bool {
    matches!(e, Error::OutOfSpace { .. } | Error::Relation(_))
}

pub fn construct(params: &FamilyParams, cfg: &BuildConfig) -> Result<Constructed> {
    use Family::*;
    match params.family {
        H3 | K3 => {
            let j = construct(&params.with_family(J3)?, cfg)?;
            let depth = params.family.quotient_depth();
            let (terms, _) = j.group.upper_central_series()?;
            let group = j.group.quotient(&terms[depth - 1])?;
            Ok(Constructed {
                params: params.clone(),
                group,
                presentation: None,
                method: Method::Quotient {
                    of: j.params.label(),
                    term: depth,
                },
            })
        }
        G => {
            let beta = params.alpha;
            let pres = presentation(params)?;
            match dense_from(&pres, cfg) {
                Ok(group) => Ok(Constructed {
                    params: params.clone(),
                    group,
                    presentation: Some(pres),
                    method: Method::Enumerated,
                }),
                Err(e) if retryable(&e) => {
                    let jp = macdonald_as_j(beta).ok_or(e)?;
                    let jpres = presentation(&jp)?;
                    let extra: Vec<Word> = jpres.relators[2..].to_vec();
                    let aug = pres.with_extra_relators(extra.clone());
                    let group = dense_from(&aug, cfg)?;
                    check_known_order(&jp, &group)?;
                    Ok(Constructed {
                        params: params.clone(),
                        group,
                        presentation: Some(pres.clone()),
                        method: Method::Augmented {
                            relators: extra.iter().map(|w| w.display_with(&pres.names)).collect(),
                        },
                    })
                }
                Err(e) => Err(e),
            }
        }
        _ => {
            let pres = presentation(params)?;
            match dense_from(&pres, cfg) {
                Ok(group) => Ok(Constructed {
                    params: params.clone(),
                    group,
                    presentation: Some(pres),
                    method: Method::Enumerated,
                }),
                Err(e) if retryable(&e) => {
                    let extra = fundamental_relator(params).ok_or(e)?;
                    let aug = pres.with_extra_relators([extra.clone()]);
                    let group = dense_from(&aug, cfg)?;
                    if params.family.quotient_depth() == 0 {
                        check_known_order(params, &group)?;
                    } else {
                        // Compare with the quotient of the J group.
                        let j = construct(&params.with_family(params.family.parent())?, cfg)?;
                        let (terms, _) = j.group.upper_central_series()?;
                        let depth = params.family.quotient_depth();
                        if j.group.order() / terms[depth - 1].order() != group.order() {
                            return Err(Error::Relation("augmented enumeration lost elements".into()));
                        }
                    }
                    Ok(Constructed {
                        params: params.clone(),
                        group,
                        presentation: Some(pres.clone()),
                        method: Method::Augmented {
                            relators: vec![extra.display_with(&pres.names)],
                        },
                    })
                }
                Err(e) => Err(e),
            }
        }
    }
}

fn check_known_order(params: &FamilyParams, group: &DenseGroup) -> Result<()> {
    let want = expected_order(params)?.to_usize();
    if want != Some(group.order()) {
        return Err(Error::Relation(format!(
            "augmented enumeration of {} gave order {}, expected {:?}",
            params.label(),
            group.order(),
            want
        )));
    }
    Ok(())
}
