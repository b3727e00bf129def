//! Plain-text descriptors for groups, subgroups, relations, and modules.
//!
//! Grammar (case-insensitive, whitespace ignored around tokens):
//!
//! ```text
//! group    := factor ( "*" factor )*
//! factor   := "gl2(" prime ")" | "aff8" | "sym(" n ")" | "cyclic(" n ")"
//!           | "dihedral(" n ")" | "quat8"
//! subgroup := \[ "sub:" \] part ( "*" part )*
//!           | "gens:\[" cycles ( "," cycles )* "\]"
//!           | "cyclic(" cycles ")"
//! part     := "borel" | "up" | "up'" | "u2" | "u2'" | "h"
//!           | "whole" | "g" | "trivial" | "1"
//! cycles   := ( "(" point ( " " point )* ")" )*        -- 1-based points
//! relation := \[ "rel:" \] subgroup ( ("+"|"-") subgroup )* "@" group
//! module   := atom ( "+" atom )*
//! atom     := "I2" | "I3" | "I5" | "I7" | "trivial" | "regular"
//! ```

use crate::error::{Error, Result};
use crate::group::{PermGroup, Subgroup};
use crate::named::{make_named_group, make_named_subgroup, GroupSpec, SubgroupSpec};
use crate::relations::Relation;
use crate::repmod::{self, direct_sum, Representation};

fn parse_err(input: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        input: input.to_string(),
        reason: reason.into(),
    }
}

/// Split on a separator at bracket depth zero.
fn split_top_level(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    for ch in s.chars() {
        match ch {
            '(' | '[' => {
                depth += 1;
                current.push(ch);
            }
            ')' | ']' => {
                depth -= 1;
                current.push(ch);
            }
            c if c == sep && depth == 0 => {
                out.push(current.trim().to_string());
                current = String::new();
            }
            _ => current.push(ch),
        }
    }
    out.push(current.trim().to_string());
    out
}

fn parse_paren_arg<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    let rest = s.strip_prefix(name)?;
    let rest = rest.strip_prefix('(')?;
    rest.strip_suffix(')')
}

pub fn parse_group(text: &str) -> Result<GroupSpec> {
    let text = text.trim().to_lowercase();
    let factors = split_top_level(&text, '*');
    let mut specs = Vec::new();
    for f in &factors {
        specs.push(parse_group_factor(f)?);
    }
    Ok(if specs.len() == 1 {
        specs.into_iter().next().unwrap()
    } else {
        GroupSpec::Product(specs)
    })
}

fn parse_group_factor(f: &str) -> Result<GroupSpec> {
    if f == "aff8" {
        return Ok(GroupSpec::Aff8);
    }
    if f == "quat8" {
        return Ok(GroupSpec::Quat8);
    }
    let numeric = |name: &str| -> Option<Result<u64>> {
        parse_paren_arg(f, name).map(|arg| {
            arg.trim()
                .parse::<u64>()
                .map_err(|_| parse_err(f, "expected a number"))
        })
    };
    if let Some(p) = numeric("gl2") {
        return Ok(GroupSpec::Gl2(p?));
    }
    if let Some(n) = numeric("sym") {
        return Ok(GroupSpec::Sym(n? as usize));
    }
    if let Some(n) = numeric("cyclic") {
        return Ok(GroupSpec::Cyclic(n? as usize));
    }
    if let Some(n) = numeric("dihedral") {
        return Ok(GroupSpec::Dihedral(n? as usize));
    }
    Err(parse_err(
        f,
        "expected gl2(p), aff8, sym(n), cyclic(n), dihedral(n) or quat8",
    ))
}

/// Cycle words like `(1 2)(3 4 5)` with 1-based points.
pub fn parse_cycles(text: &str) -> Result<Vec<Vec<u16>>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let mut cycles = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        let Some(stripped) = rest.strip_prefix('(') else {
            return Err(parse_err(text, "expected ( to open a cycle"));
        };
        let Some(close) = stripped.find(')') else {
            return Err(parse_err(text, "unclosed cycle"));
        };
        let body = &stripped[..close];
        let mut cycle = Vec::new();
        for tok in body.split([' ', ',']).filter(|t| !t.is_empty()) {
            let point: u16 = tok
                .parse()
                .map_err(|_| parse_err(text, format!("bad point `{tok}`")))?;
            if point == 0 {
                return Err(parse_err(text, "points are 1-based"));
            }
            cycle.push(point - 1);
        }
        if !cycle.is_empty() {
            cycles.push(cycle);
        }
        rest = stripped[close + 1..].trim_start();
    }
    Ok(cycles)
}

pub fn parse_subgroup(text: &str) -> Result<SubgroupSpec> {
    let trimmed = text.trim();
    let lowered = trimmed.to_lowercase();
    let body = lowered.strip_prefix("sub:").unwrap_or(&lowered).trim();
    if let Some(inner) = body
        .strip_prefix("gens:[")
        .and_then(|r| r.strip_suffix(']'))
    {
        let words = split_top_level(inner, ',');
        let mut gens = Vec::new();
        for w in words.iter().filter(|w| !w.is_empty()) {
            gens.push(parse_cycles(w)?);
        }
        return Ok(SubgroupSpec::Generators(gens));
    }
    if let Some(inner) = parse_paren_arg(body, "cyclic") {
        return Ok(SubgroupSpec::Cyclic(parse_cycles(inner)?));
    }
    let parts = split_top_level(body, '*');
    let mut specs = Vec::new();
    for p in &parts {
        specs.push(match p.as_str() {
            "borel" | "b" => SubgroupSpec::Borel,
            "up" => SubgroupSpec::Up,
            "up'" => SubgroupSpec::UpPrime,
            "u2" => SubgroupSpec::U2,
            "u2'" => SubgroupSpec::U2Prime,
            "h" => SubgroupSpec::H,
            "whole" | "g" => SubgroupSpec::Whole,
            "trivial" | "1" => SubgroupSpec::Trivial,
            other => return Err(parse_err(other, "unknown subgroup name")),
        });
    }
    Ok(if specs.len() == 1 {
        specs.into_iter().next().unwrap()
    } else {
        SubgroupSpec::Product(specs)
    })
}

/// `up - up' @ gl2(3)`, with optional `rel:` prefix and `+`/`-` terms.
pub fn parse_relation_text(
    text: &str,
) -> Result<(GroupSpec, Vec<SubgroupSpec>, Vec<SubgroupSpec>)> {
    let trimmed = text.trim();
    let body = trimmed
        .strip_prefix("rel:")
        .or_else(|| trimmed.strip_prefix("Rel:"))
        .unwrap_or(trimmed);
    let at = split_top_level(body, '@');
    if at.len() != 2 {
        return Err(parse_err(text, "expected `terms @ group`"));
    }
    let group = parse_group(&at[1])?;

    // scan top-level signed terms
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    let mut depth = 0i32;
    let mut sign = 1i32;
    let mut current = String::new();
    let flush = |sign: i32,
                 term: &str,
                 plus: &mut Vec<SubgroupSpec>,
                 minus: &mut Vec<SubgroupSpec>|
     -> Result<()> {
        let term = term.trim();
        if term.is_empty() {
            return Err(parse_err(term, "empty relation term"));
        }
        let spec = parse_subgroup(term)?;
        if sign > 0 {
            plus.push(spec);
        } else {
            minus.push(spec);
        }
        Ok(())
    };
    for ch in at[0].chars() {
        match ch {
            '(' | '[' => {
                depth += 1;
                current.push(ch);
            }
            ')' | ']' => {
                depth -= 1;
                current.push(ch);
            }
            '+' | '-' if depth == 0 && !current.trim().is_empty() => {
                flush(sign, &current, &mut plus, &mut minus)?;
                current = String::new();
                sign = if ch == '+' { 1 } else { -1 };
            }
            '-' if depth == 0 => {
                sign = -sign;
            }
            _ => current.push(ch),
        }
    }
    flush(sign, &current, &mut plus, &mut minus)?;
    if plus.is_empty() || minus.is_empty() {
        return Err(parse_err(text, "a relation needs terms on both sides"));
    }
    Ok((group, plus, minus))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleSpec {
    Ip(u64),
    I2,
    Trivial,
    Regular,
    Sum(Vec<ModuleSpec>),
}

pub fn parse_module(text: &str) -> Result<ModuleSpec> {
    let lowered = text.trim().to_lowercase();
    let parts = split_top_level(&lowered, '+');
    let mut specs = Vec::new();
    for p in &parts {
        specs.push(match p.as_str() {
            "i2" => ModuleSpec::I2,
            "trivial" => ModuleSpec::Trivial,
            "regular" => ModuleSpec::Regular,
            other => {
                let p_num = other
                    .strip_prefix('i')
                    .and_then(|n| n.parse::<u64>().ok())
                    .ok_or_else(|| parse_err(other, "unknown module name"))?;
                ModuleSpec::Ip(p_num)
            }
        });
    }
    Ok(if specs.len() == 1 {
        specs.into_iter().next().unwrap()
    } else {
        ModuleSpec::Sum(specs)
    })
}

pub fn parse_primes(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| parse_err(text, format!("bad prime `{t}`")))
        })
        .collect()
}

pub fn resolve_group(text: &str, cap: u64) -> Result<PermGroup> {
    make_named_group(&parse_group(text)?, cap)
}

pub fn resolve_subgroup(group: &PermGroup, text: &str) -> Result<Subgroup> {
    make_named_subgroup(group, &parse_subgroup(text)?)
}

pub fn resolve_relation(text: &str, cap: u64) -> Result<Relation> {
    let (gspec, plus, minus) = parse_relation_text(text)?;
    let group = make_named_group(&gspec, cap)?;
    let plus = plus
        .iter()
        .map(|s| make_named_subgroup(&group, s))
        .collect::<Result<Vec<_>>>()?;
    let minus = minus
        .iter()
        .map(|s| make_named_subgroup(&group, s))
        .collect::<Result<Vec<_>>>()?;
    Relation::new(plus, minus)
}

pub fn resolve_module(group: &PermGroup, spec: &ModuleSpec) -> Result<Representation> {
    match spec {
        ModuleSpec::Ip(p) => {
            if *p == 2 {
                repmod::module_i2_over(group)
            } else {
                repmod::module_ip_over(group, *p)
            }
        }
        ModuleSpec::I2 => repmod::module_i2_over(group),
        ModuleSpec::Trivial => {
            Ok(Representation::permutation_module(&Subgroup::whole(group)).with_label("trivial"))
        }
        ModuleSpec::Regular => {
            Ok(Representation::permutation_module(&Subgroup::trivial(group)).with_label("regular"))
        }
        ModuleSpec::Sum(parts) => {
            let resolved = parts
                .iter()
                .map(|s| resolve_module(group, s))
                .collect::<Result<Vec<_>>>()?;
            direct_sum(&resolved)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_descriptors_round_trip() {
        assert_eq!(parse_group("gl2(3)").unwrap(), GroupSpec::Gl2(3));
        assert_eq!(parse_group("AFF8").unwrap(), GroupSpec::Aff8);
        assert_eq!(
            parse_group("aff8 * gl2(3)").unwrap(),
            GroupSpec::Product(vec![GroupSpec::Aff8, GroupSpec::Gl2(3)])
        );
        assert_eq!(parse_group("sym(4)").unwrap(), GroupSpec::Sym(4));
        assert!(parse_group("so(3)").is_err());
    }

    #[test]
    fn subgroup_descriptors() {
        assert_eq!(parse_subgroup("sub:up").unwrap(), SubgroupSpec::Up);
        assert_eq!(parse_subgroup("up'").unwrap(), SubgroupSpec::UpPrime);
        assert_eq!(
            parse_subgroup("sub:u2'*up").unwrap(),
            SubgroupSpec::Product(vec![SubgroupSpec::U2Prime, SubgroupSpec::Up])
        );
        assert_eq!(
            parse_subgroup("gens:[(1 2),(3 4 5)]").unwrap(),
            SubgroupSpec::Generators(vec![vec![vec![0, 1]], vec![vec![2, 3, 4]]])
        );
        assert_eq!(
            parse_subgroup("cyclic((1 2)(3 4))").unwrap(),
            SubgroupSpec::Cyclic(vec![vec![0, 1], vec![2, 3]])
        );
    }

    #[test]
    fn relation_descriptors() {
        let (g, plus, minus) = parse_relation_text("rel: up - up' @ gl2(3)").unwrap();
        assert_eq!(g, GroupSpec::Gl2(3));
        assert_eq!(plus, vec![SubgroupSpec::Up]);
        assert_eq!(minus, vec![SubgroupSpec::UpPrime]);

        let (_, plus, minus) = parse_relation_text("up + borel - up' - borel @ gl2(3)").unwrap();
        assert_eq!(plus.len(), 2);
        assert_eq!(minus.len(), 2);

        assert!(parse_relation_text("up @ gl2(3)").is_err());
    }

    #[test]
    fn module_descriptors() {
        assert_eq!(parse_module("I3").unwrap(), ModuleSpec::Ip(3));
        assert_eq!(parse_module("i2").unwrap(), ModuleSpec::I2);
        assert_eq!(
            parse_module("I3 + trivial").unwrap(),
            ModuleSpec::Sum(vec![ModuleSpec::Ip(3), ModuleSpec::Trivial])
        );
        assert!(parse_module("V").is_err());
    }

    #[test]
    fn resolution_produces_working_objects() {
        let rel = resolve_relation("up - up' @ gl2(3)", 2_000_000).unwrap();
        assert!(rel.is_q_relation());

        let g = resolve_group("gl2(3)", 2_000_000).unwrap();
        let m = resolve_module(&g, &ModuleSpec::Ip(3)).unwrap();
        assert_eq!(m.dim(), 4);
        let t = resolve_module(&g, &parse_module("trivial+regular").unwrap()).unwrap();
        assert_eq!(t.dim(), 49);
    }

    #[test]
    fn prime_lists() {
        assert_eq!(parse_primes("2,3,5").unwrap(), vec![2, 3, 5]);
        assert_eq!(parse_primes(" 7 ").unwrap(), vec![7]);
        assert!(parse_primes("2,x").is_err());
    }
}
