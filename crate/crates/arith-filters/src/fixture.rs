//! Arithmetic truth data: abelianization profiles per index, critical
//! subgroup data and capitulation kernels. The shipped `q5460` instance
//! holds the field-theoretic values for Q(sqrt(-5460)); the number theory
//! behind them is an input here, never recomputed.

use pc_core::{AbelianInvariants, PcPresentation};
use serde_json::Value;

use crate::error::FilterError;

/// One critical index-p^2 subgroup: unique abelianization plus the multiset
/// of abelianizations of its maximal subgroups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalFixture {
    pub ab: AbelianInvariants,
    /// Sorted multiset over all index-2 subgroups of the critical subgroup.
    pub maximal_profile: Vec<AbelianInvariants>,
}

/// Capitulation data for one index-p subgroup, keyed by its abelianization
/// and (optionally) the abelianizations of the index-p^2 classes below it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapitulationEntry {
    pub subgroup_ab: AbelianInvariants,
    pub contains4: Option<Vec<AbelianInvariants>>,
    pub kernel_invariants: AbelianInvariants,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithmeticFixture {
    pub prime: u32,
    pub target_ab: AbelianInvariants,
    /// Sorted multiset over conjugacy classes of index-p subgroups.
    pub index2_profile: Vec<AbelianInvariants>,
    /// Sorted multiset over conjugacy classes of index-p^2 subgroups.
    pub index4_profile: Vec<AbelianInvariants>,
    pub critical_profiles: Vec<CriticalFixture>,
    /// (index2 class position, index4 class position) containments, keyed by
    /// the canonical class order; absent when not tabulated.
    pub lattice: Option<Vec<(usize, usize)>>,
    pub capitulation: Option<Vec<CapitulationEntry>>,
}

impl ArithmeticFixture {
    /// The shipped fixture for Q(sqrt(-5460)).
    pub fn q5460() -> ArithmeticFixture {
        static TEXT: &str = include_str!("../data/q5460.fixture");
        ArithmeticFixture::from_json(TEXT).expect("shipped fixture must parse and validate")
    }

    pub fn from_json(text: &str) -> Result<ArithmeticFixture, FilterError> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| FilterError::Fixture(format!("json: {e}")))?;
        let p = v["p"].as_u64().ok_or_else(|| bad("missing prime"))? as u32;
        let target_ab = parse_ab(&v["target_ab"], p)?;
        let index2_profile = parse_profile(&v["index2"], p)?;
        let index4_profile = parse_profile(&v["index4"], p)?;
        let mut critical_profiles = Vec::new();
        for c in v["critical"].as_array().ok_or_else(|| bad("missing critical array"))? {
            critical_profiles.push(CriticalFixture {
                ab: parse_ab(&c["ab"], p)?,
                maximal_profile: parse_profile(&c["maximal_profile"], p)?,
            });
        }
        let lattice = match &v["lattice"] {
            Value::Null => None,
            Value::Array(pairs) => Some(
                pairs
                    .iter()
                    .map(|pair| {
                        let a = pair[0].as_u64().ok_or_else(|| bad("lattice pair"))? as usize;
                        let b = pair[1].as_u64().ok_or_else(|| bad("lattice pair"))? as usize;
                        Ok((a, b))
                    })
                    .collect::<Result<Vec<_>, FilterError>>()?,
            ),
            _ => return Err(bad("lattice must be null or an array")),
        };
        let capitulation = match &v["capitulation"] {
            Value::Null => None,
            Value::Array(entries) => Some(
                entries
                    .iter()
                    .map(|e| {
                        Ok(CapitulationEntry {
                            subgroup_ab: parse_ab(&e["ab"], p)?,
                            contains4: match &e["contains4"] {
                                Value::Null => None,
                                arr => {
                                    let mut v = arr
                                        .as_array()
                                        .ok_or_else(|| bad("contains4"))?
                                        .iter()
                                        .map(|x| parse_ab(x, p))
                                        .collect::<Result<Vec<_>, _>>()?;
                                    v.sort();
                                    Some(v)
                                }
                            },
                            kernel_invariants: parse_ab(&e["kernel"], p)?,
                        })
                    })
                    .collect::<Result<Vec<_>, FilterError>>()?,
            ),
            _ => return Err(bad("capitulation must be null or an array")),
        };
        let fixture = ArithmeticFixture {
            prime: p,
            target_ab,
            index2_profile,
            index4_profile,
            critical_profiles,
            lattice,
            capitulation,
        };
        fixture.validate()?;
        Ok(fixture)
    }

    /// Internal consistency: the index-p count matches the hyperplane count
    /// of the target, critical entries are exactly the multiplicity-one
    /// abelianizations of the index-p^2 profile, and each critical profile
    /// has one entry per maximal subgroup.
    pub fn validate(&self) -> Result<(), FilterError> {
        let p = self.prime;
        let d = self.target_ab.rank() as u32;
        let hyperplanes = ((p as u128).pow(d) - 1) / (p as u128 - 1);
        if self.index2_profile.len() as u128 != hyperplanes {
            return Err(bad(&format!(
                "index-{p} profile has {} entries, expected {hyperplanes}",
                self.index2_profile.len()
            )));
        }
        let uniques = multiplicity_one(&self.index4_profile);
        let mut claimed: Vec<_> = self.critical_profiles.iter().map(|c| c.ab.clone()).collect();
        claimed.sort();
        if uniques != claimed {
            return Err(bad("critical entries must be the unique abelianizations of the index-p^2 profile"));
        }
        for c in &self.critical_profiles {
            let dh = c.ab.rank() as u32;
            let expected = ((p as u128).pow(dh) - 1) / (p as u128 - 1);
            if c.maximal_profile.len() as u128 != expected {
                return Err(bad(&format!(
                    "critical {} has {} maximal entries, expected {expected}",
                    c.ab,
                    c.maximal_profile.len()
                )));
            }
        }
        Ok(())
    }

    /// Build the fixture a group would produce about itself: the group-side
    /// of the dictionary, used for self-consistency tests and synthetic
    /// capitulation fixtures.
    pub fn from_group(pres: &PcPresentation) -> Result<ArithmeticFixture, FilterError> {
        let lattice = pres.low_index_subgroups(2)?;
        let level2 = &lattice.levels[0];
        let level4 = &lattice.levels[1];
        let mut index2_profile: Vec<_> =
            level2.iter().map(|c| c.handle.abelianization(pres).clone()).collect();
        index2_profile.sort();
        let mut index4_profile: Vec<_> =
            level4.iter().map(|c| c.handle.abelianization(pres).clone()).collect();
        index4_profile.sort();
        let uniques = multiplicity_one(&index4_profile);
        let mut critical_profiles = Vec::new();
        for ab in &uniques {
            let class = level4
                .iter()
                .find(|c| c.handle.abelianization(pres) == ab)
                .expect("unique abelianization has a class");
            critical_profiles.push(CriticalFixture {
                ab: ab.clone(),
                maximal_profile: maximal_profile_of(pres, &class.handle.subgroup)?,
            });
        }
        let pairs = lattice
            .incidence
            .iter()
            .filter(|&&(lv, _, _)| lv == 0)
            .map(|&(_, up, lo)| (up, lo))
            .collect();
        Ok(ArithmeticFixture {
            prime: pres.prime(),
            target_ab: pc_core::abelian::abelian_invariants(pres),
            index2_profile,
            index4_profile,
            critical_profiles,
            lattice: Some(pairs),
            capitulation: None,
        })
    }
}

/// Sorted multiset of the abelianizations of all maximal subgroups of H
/// (as subgroups, not up to conjugacy: the hyperplanes of H/Phi(H)).
pub fn maximal_profile_of(
    pres: &PcPresentation,
    h: &pc_core::Subgroup,
) -> Result<Vec<AbelianInvariants>, FilterError> {
    let mut out = Vec::new();
    for m in pres.maximal_subgroups_in(h)? {
        out.push(pc_core::abelian::subgroup_abelian_invariants(pres, &m));
    }
    out.sort();
    Ok(out)
}

/// Entries occurring exactly once, sorted.
pub fn multiplicity_one(profile: &[AbelianInvariants]) -> Vec<AbelianInvariants> {
    let mut out = Vec::new();
    for ab in profile {
        if profile.iter().filter(|x| *x == ab).count() == 1 {
            out.push(ab.clone());
        }
    }
    out.sort();
    out.dedup();
    out
}

fn bad(msg: &str) -> FilterError {
    FilterError::Fixture(msg.to_string())
}

fn parse_ab(v: &Value, p: u32) -> Result<AbelianInvariants, FilterError> {
    let arr = v.as_array().ok_or_else(|| bad("abelianization must be an array"))?;
    let mut exps = Vec::with_capacity(arr.len());
    for x in arr {
        let mut n = x.as_u64().ok_or_else(|| bad("abelianization entry"))?;
        let mut k = 0u32;
        while n > 1 && n % p as u64 == 0 {
            n /= p as u64;
            k += 1;
        }
        if n != 1 || k == 0 {
            return Err(bad("abelianization entries must be powers of the fixture prime"));
        }
        exps.push(k);
    }
    Ok(AbelianInvariants::new(p, exps))
}

fn parse_profile(v: &Value, p: u32) -> Result<Vec<AbelianInvariants>, FilterError> {
    let arr = v.as_array().ok_or_else(|| bad("profile must be an array"))?;
    let mut out = Vec::new();
    for entry in arr {
        let ab = parse_ab(&entry["ab"], p)?;
        let count = entry["count"].as_u64().ok_or_else(|| bad("profile count"))?;
        for _ in 0..count {
            out.push(ab.clone());
        }
    }
    out.sort();
    Ok(out)
}
