//! Reports: a JSON rendering that round-trips, and a plain-text one.
//!
//! Integers are carried as decimal strings so that nothing is rounded.

use std::fmt::Write as _;

use crystor::abelian::{AbelianGroup, Int};
use crystor::crys::Crys1;
use crystor::suite::Check;
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub version: String,
    pub command: Vec<String>,
    /// SHA-256 of the input file, hex.
    pub input_digest: Option<String>,
    pub result: Payload,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct GroupRecord {
    pub display: String,
    pub invariants: Vec<String>,
    pub order: String,
}

impl<T: Int> From<&AbelianGroup<T>> for GroupRecord {
    fn from(g: &AbelianGroup<T>) -> Self {
        Self {
            display: g.to_string(),
            invariants: g.invariants().iter().map(ToString::to_string).collect(),
            order: g.order().to_string(),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct Crys1Record {
    pub level: String,
    pub exponent: u32,
    pub labels: Vec<String>,
    pub generators: Vec<Vec<String>>,
    pub group: GroupRecord,
    pub order: String,
    pub ambient_order: String,
    pub is_full: bool,
    pub oracle_agrees: Option<bool>,
}

impl Crys1Record {
    pub fn new<T: Int>(c: &Crys1<T>, oracle_agrees: Option<bool>) -> Self {
        let t = c.toric_rank();
        Self {
            level: c.level().to_string(),
            exponent: c.exponent(),
            labels: (1..=t)
                .map(|i| format!("x{i}"))
                .chain((1..=t).map(|j| format!("y{j}")))
                .collect(),
            generators: c
                .generators()
                .iter()
                .map(|g| g.iter().map(ToString::to_string).collect())
                .collect(),
            group: c.group().into(),
            order: c.order().to_string(),
            ambient_order: c.ambient_order().to_string(),
            is_full: c.is_full(),
            oracle_agrees,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl From<&Check> for CheckRecord {
    fn from(c: &Check) -> Self {
        Self {
            name: c.name.clone(),
            passed: c.passed,
            detail: c.detail.clone(),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    ComponentGroup {
        group: GroupRecord,
        p_part: Option<GroupRecord>,
    },
    Torsion {
        level: String,
        exponent: u32,
        order: String,
        labels: Vec<String>,
        torus_order: String,
        etale_order: String,
        val_matrix: Vec<Vec<String>>,
        kappa: Vec<Vec<String>>,
    },
    Crys1(Crys1Record),
    PhiCheck {
        level: String,
        quotient: GroupRecord,
        phi: GroupRecord,
        agrees: bool,
    },
    R1 {
        cap: u32,
        group: GroupRecord,
        stable_from: u32,
    },
    Les {
        cap: u32,
        rank: usize,
        weight: i64,
        divisible_rank: usize,
        colimit_torsion: GroupRecord,
        r1_torsion: GroupRecord,
        finite_exact: Vec<bool>,
        transitions: Vec<bool>,
        connecting: bool,
        all_exact: bool,
    },
    Tate(Crys1Record),
    Verify {
        seed: u64,
        checks: Vec<CheckRecord>,
        passed: usize,
        failed: usize,
    },
    Error {
        id: String,
        message: String,
        field: Option<String>,
        line: Option<usize>,
        column: Option<usize>,
    },
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        render(&mut out, &self.result).expect("writing to a string");
        out
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn vector(v: &[String]) -> String {
    format!("({})", v.join(", "))
}

fn render_crys1(out: &mut String, title: &str, c: &Crys1Record) -> std::fmt::Result {
    writeln!(out, "{title}(A[{}]) ≅ {}", c.level, c.group.display)?;
    writeln!(
        out,
        "  order {} of {}{}",
        c.order,
        c.ambient_order,
        if c.is_full { " (full)" } else { "" }
    )?;
    writeln!(out, "  coordinates {}", vector(&c.labels))?;
    for g in &c.generators {
        writeln!(out, "  generator {}", vector(g))?;
    }
    if let Some(agrees) = c.oracle_agrees {
        writeln!(out, "  oracle agrees: {}", yes(agrees))?;
    }
    Ok(())
}

fn render(out: &mut String, p: &Payload) -> std::fmt::Result {
    match p {
        Payload::ComponentGroup { group, p_part } => {
            writeln!(out, "component group: {}", group.display)?;
            writeln!(out, "  order {}", group.order)?;
            if let Some(pp) = p_part {
                writeln!(out, "  p-primary part: {}", pp.display)?;
            }
        }
        Payload::Torsion {
            level,
            order,
            labels,
            torus_order,
            etale_order,
            val_matrix,
            kappa,
            ..
        } => {
            writeln!(out, "A[{level}] in coordinates {}", vector(labels))?;
            writeln!(
                out,
                "  order {order} = {torus_order} (torus) x {etale_order} (étale)"
            )?;
            writeln!(out, "  valuation matrix mod {level}:")?;
            for row in val_matrix {
                writeln!(out, "    {}", vector(row))?;
            }
            writeln!(out, "  Kummer classes:")?;
            for row in kappa {
                writeln!(out, "    {}", vector(row))?;
            }
        }
        Payload::Crys1(c) => render_crys1(out, "Crys1", c)?,
        Payload::Tate(c) => render_crys1(out, "Crys1 (closed form)", c)?,
        Payload::PhiCheck {
            level,
            quotient,
            phi,
            agrees,
        } => {
            writeln!(out, "Crys1(A[{level}]) / T[{level}] ≅ {}", quotient.display)?;
            writeln!(out, "Φ[{level}] ≅ {}", phi.display)?;
            writeln!(out, "  agree: {}", yes(*agrees))?;
        }
        Payload::R1 {
            cap,
            group,
            stable_from,
        } => {
            writeln!(out, "R1Crys1 torsion ≅ {}", group.display)?;
            writeln!(out, "  stable from m = {stable_from} (cap {cap})")?;
        }
        Payload::Les {
            cap,
            rank,
            weight,
            divisible_rank,
            colimit_torsion,
            r1_torsion,
            finite_exact,
            transitions,
            all_exact,
            ..
        } => {
            writeln!(
                out,
                "Crys1(L) and Crys1(L[1/p]): rank {rank}, weight {weight}"
            )?;
            writeln!(
                out,
                "Crys1(L ⊗ Qp/Zp) at m = {cap}: divisible rank {divisible_rank}, torsion {}",
                colimit_torsion.display
            )?;
            writeln!(out, "R1Crys1(L) torsion: {}", r1_torsion.display)?;
            let ok = |v: &[bool]| v.iter().filter(|b| **b).count();
            writeln!(
                out,
                "  finite levels exact: {}/{}",
                ok(finite_exact),
                finite_exact.len()
            )?;
            writeln!(
                out,
                "  transitions compatible: {}/{}",
                ok(transitions),
                transitions.len()
            )?;
            writeln!(out, "  exact: {}", yes(*all_exact))?;
        }
        Payload::Verify {
            seed,
            checks,
            passed,
            failed,
        } => {
            for c in checks {
                let mark = if c.passed { "ok  " } else { "FAIL" };
                if c.detail.is_empty() {
                    writeln!(out, "{mark} {}", c.name)?;
                } else {
                    writeln!(out, "{mark} {}: {}", c.name, c.detail)?;
                }
            }
            writeln!(out, "{passed} passed, {failed} failed (seed {seed})")?;
        }
        Payload::Error {
            id,
            message,
            field,
            line,
            column,
        } => {
            write!(out, "error[{id}]")?;
            if let (Some(l), Some(c)) = (line, column) {
                write!(out, " at {l}:{c}")?;
            }
            if let Some(f) = field {
                write!(out, " in {f}")?;
            }
            writeln!(out, ": {message}")?;
        }
    }
    Ok(())
}
