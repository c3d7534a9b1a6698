//! Structured summary of one group: order, generators, class, ranks,
//! profiles, power subgroups, terminal and moribund verdicts.

use arith_filters::{relator_rank_bounds, FilterError};
use pc_core::{abelian, AbelianInvariants, PcPresentation};
use tree::cover::p_covering_group;
use tree::{is_moribund, Limits, MoribundVerdict};

#[derive(Debug, Clone)]
pub struct PowerInfo {
    pub k: u32,
    pub index_exponent: u32,
    pub abelian: bool,
}

#[derive(Debug, Clone)]
pub struct GroupReport {
    pub order_exponent: usize,
    pub dgens: usize,
    pub p_class: u32,
    pub abelianization: AbelianInvariants,
    pub multiplicator_rank: usize,
    pub nuclear_rank: usize,
    pub relator_bounds: (u32, u32),
    pub terminal: bool,
    pub index2_profile: Vec<AbelianInvariants>,
    pub index4_profile: Vec<AbelianInvariants>,
    pub powers: Vec<PowerInfo>,
    pub moribund: Option<MoribundVerdict>,
    pub moribund_depth: u32,
}

pub fn report(
    pres: &PcPresentation,
    limits: &Limits,
    moribund_depth: u32,
) -> Result<GroupReport, FilterError> {
    let cov = p_covering_group(pres, limits)?;
    let mut powers = Vec::new();
    for k in [1u32, 2, 3] {
        if let Ok(h) = pres.power_subgroup(k, 1 << 24) {
            powers.push(PowerInfo {
                k,
                index_exponent: h.index_exponent,
                abelian: h.subgroup.is_abelian(pres),
            });
        }
    }
    let moribund = is_moribund(pres, moribund_depth, limits).ok();
    Ok(GroupReport {
        order_exponent: pres.order_exponent(),
        dgens: pres.dgens(),
        p_class: pres.p_class(),
        abelianization: abelian::abelian_invariants(pres),
        multiplicator_rank: cov.multiplicator_rank(),
        nuclear_rank: cov.nuclear_rank(),
        relator_bounds: relator_rank_bounds(pres, limits)?,
        terminal: cov.nuclear_rank() == 0,
        index2_profile: pres.abelianization_profile(1)?,
        index4_profile: pres.abelianization_profile(2)?,
        powers,
        moribund,
        moribund_depth,
    })
}

fn profile_string(profile: &[AbelianInvariants]) -> String {
    // Collapse the sorted multiset into "ab (n times)" notation.
    let mut out: Vec<String> = Vec::new();
    let mut i = 0;
    while i < profile.len() {
        let mut j = i;
        while j < profile.len() && profile[j] == profile[i] {
            j += 1;
        }
        out.push(format!("{} x{}", profile[i], j - i));
        i = j;
    }
    out.join(", ")
}

impl GroupReport {
    pub fn render_text(&self, p: u32) -> String {
        let mut s = String::new();
        s.push_str(&format!("order            {p}^{}\n", self.order_exponent));
        s.push_str(&format!("generators d(G)  {}\n", self.dgens));
        s.push_str(&format!("p-class          {}\n", self.p_class));
        s.push_str(&format!("abelianization   {}\n", self.abelianization));
        s.push_str(&format!(
            "multiplicator rank {}   nuclear rank {}\n",
            self.multiplicator_rank, self.nuclear_rank
        ));
        let (lo, hi) = self.relator_bounds;
        if lo == hi {
            s.push_str(&format!("relator rank     {lo} (pinned)\n"));
        } else {
            s.push_str(&format!("relator rank     between {lo} and {hi}\n"));
        }
        s.push_str(&format!("terminal         {}\n", self.terminal));
        match self.moribund {
            Some(MoribundVerdict::Moribund { at_depth }) => {
                s.push_str(&format!("moribund         yes (covering chain depth {at_depth})\n"))
            }
            Some(MoribundVerdict::Unknown) => s.push_str(&format!(
                "moribund         unknown (one-sided test, depth {})\n",
                self.moribund_depth
            )),
            None => s.push_str("moribund         not computed (cap exceeded)\n"),
        }
        s.push_str(&format!("index-{p} profile   {}\n", profile_string(&self.index2_profile)));
        s.push_str(&format!(
            "index-{} profile  {}\n",
            p * p,
            profile_string(&self.index4_profile)
        ));
        for pw in &self.powers {
            s.push_str(&format!(
                "G^{}{}             index {p}^{}, {}\n",
                p.pow(pw.k),
                if p.pow(pw.k) < 10 { " " } else { "" },
                pw.index_exponent,
                if pw.abelian { "abelian" } else { "non-abelian" }
            ));
        }
        s
    }

    pub fn render_json(&self, p: u32) -> serde_json::Value {
        let prof = |v: &[AbelianInvariants]| -> Vec<String> {
            v.iter().map(|ab| ab.to_string()).collect()
        };
        serde_json::json!({
            "prime": p,
            "order_exponent": self.order_exponent,
            "dgens": self.dgens,
            "p_class": self.p_class,
            "abelianization": self.abelianization.to_string(),
            "multiplicator_rank": self.multiplicator_rank,
            "nuclear_rank": self.nuclear_rank,
            "relator_bounds": [self.relator_bounds.0, self.relator_bounds.1],
            "terminal": self.terminal,
            "moribund": match self.moribund {
                Some(MoribundVerdict::Moribund { at_depth }) => {
                    serde_json::json!({"verdict": "moribund", "at_depth": at_depth})
                }
                Some(MoribundVerdict::Unknown) => serde_json::json!({"verdict": "unknown"}),
                None => serde_json::json!({"verdict": "cap-exceeded"}),
            },
            "index2_profile": prof(&self.index2_profile),
            "index4_profile": prof(&self.index4_profile),
            "powers": self.powers.iter().map(|pw| serde_json::json!({
                "n": p.pow(pw.k),
                "index_exponent": pw.index_exponent,
                "abelian": pw.abelian,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Conjecture 9.1 report rendering lives here for the CLI.
pub fn render_conj91(r: &arith_filters::Conj91Report, p: u32) -> String {
    format!(
        "order {p}^{}\nG^8 index {p}^{} ({})\nwithin 2^40 bound: {}\n",
        r.order_exponent,
        r.index_exponent,
        if r.abelian { "abelian" } else { "non-abelian" },
        r.within_bound
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use pc_core::Definition;

    #[test]
    fn q8_report_matches_contract() {
        let q8 = PcPresentation::new(
            2,
            vec![1, 1, 2],
            vec![Definition::Initial, Definition::Initial, Definition::Power(0)],
            vec![vec![(2, 1)], vec![(2, 1)], vec![]],
            vec![vec![(2, 1)], vec![], vec![]],
        )
        .unwrap();
        let r = report(&q8, &Limits::default(), 0).unwrap();
        assert_eq!(r.order_exponent, 3);
        assert_eq!(r.dgens, 2);
        assert_eq!(r.p_class, 2);
        assert_eq!(r.abelianization, AbelianInvariants::new(2, vec![1, 1]));
        assert!(r.terminal);
        assert_eq!(r.moribund, Some(MoribundVerdict::Moribund { at_depth: 0 }));
        let text = r.render_text(2);
        assert!(text.contains("terminal         true"));
    }
}
