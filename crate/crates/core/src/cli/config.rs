//! Flat INI-style tower and curve descriptions.
//!
//! ```text
//! # comment
//! [group]
//! p = 3
//! ell = 1
//! n = 2
//! kummer_exponent = 1
//!
//! [base]
//! genus = 0
//! genus_ErT = 0          # only when some wild point is not totally ramified
//!
//! [branch]               # repeated, one per branch point
//! id = 0
//! tame_phi = 1
//! jumps = 2              # comma separated, one per Artin-Schreier step
//! epsilon = 1            # default: number of nonzero jumps
//! delta = 6              # default: from the jumps
//!
//! [curve]                # optional explicit curve over F_q
//! q = 9
//! b_roots = 0:1          # beta:phi, ...
//! f_terms = 0:1:1        # alpha:m:c, ...
//! ```
//!
//! Field elements are integer codes: base-`p` digits of the coefficient
//! vector over the prime field.

use crate::oracle::{CurveSpec, FTerm};
use crate::ramdata::{delta_from_jumps, BranchPoint, GroupSpec, TowerData, WildData};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub group: GroupSpec,
    pub base_genus: u64,
    pub genus_ert: Option<u64>,
    pub branches: Vec<BranchPoint>,
    pub curve: Option<CurveSpec>,
}

impl Config {
    /// The tower given by the `[branch]` sections, or read off the curve
    /// when there are none.
    pub fn tower(&self) -> Result<TowerData, crate::oracle::OracleError> {
        match (&self.curve, self.branches.is_empty()) {
            (Some(c), true) => c.tower(),
            _ => Ok(self.explicit_tower()),
        }
    }

    pub fn explicit_tower(&self) -> TowerData {
        let mut t = TowerData::new(self.group.clone(), self.base_genus, self.branches.clone());
        t.genus_ert = self.genus_ert;
        t
    }
}

#[derive(Default)]
struct Section {
    name: String,
    line: usize,
    entries: Vec<(usize, String, String)>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        let i = self.entries.iter().position(|e| e.1 == key)?;
        let (line, _, v) = self.entries.remove(i);
        Some((line, v))
    }

    fn finish(self) -> Result<(), ConfigError> {
        match self.entries.first() {
            Some((line, k, _)) => err(*line, format!("unknown key '{k}' in [{}]", self.name)),
            None => Ok(()),
        }
    }
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError { line, message: message.into() })
}

fn int(line: usize, key: &str, v: &str) -> Result<u64, ConfigError> {
    v.trim().parse().map_err(|_| ConfigError { line, message: format!("{key}: '{v}' is not a nonnegative integer") })
}

fn ints(line: usize, key: &str, v: &str) -> Result<Vec<u64>, ConfigError> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| int(line, key, s)).collect()
}

fn required(s: &mut Section, key: &str) -> Result<(usize, String), ConfigError> {
    let line = s.line;
    s.take(key).ok_or(ConfigError { line, message: format!("[{}] is missing '{key}'", s.name) })
}

fn optional_int(s: &mut Section, key: &str) -> Result<Option<u64>, ConfigError> {
    s.take(key).map(|(l, v)| int(l, key, &v)).transpose()
}

pub fn parse(text: &str) -> Result<Config, ConfigError> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else { return err(line, "unterminated section header") };
            let name = name.trim();
            if !matches!(name, "group" | "base" | "branch" | "curve") {
                return err(line, format!("unknown section [{name}]"));
            }
            if name != "branch" && sections.iter().any(|s| s.name == name) {
                return err(line, format!("section [{name}] appears twice"));
            }
            sections.push(Section { name: name.to_string(), line, entries: Vec::new() });
            continue;
        }
        let Some((k, v)) = content.split_once('=') else { return err(line, format!("expected key = value, got '{content}'")) };
        let Some(section) = sections.last_mut() else { return err(line, "key outside of any section") };
        let key = k.trim().to_string();
        if section.entries.iter().any(|e| e.1 == key) {
            return err(line, format!("duplicate key '{key}'"));
        }
        section.entries.push((line, key, v.trim().to_string()));
    }

    let mut group = None;
    let mut base_genus = 0;
    let mut genus_ert = None;
    let mut branches = Vec::new();
    let mut curve_section = None;
    for mut s in sections {
        match s.name.as_str() {
            "group" => {
                let (l, p) = required(&mut s, "p")?;
                let p = int(l, "p", &p)?;
                let (l, n) = required(&mut s, "n")?;
                let n = int(l, "n", &n)?;
                let ell = optional_int(&mut s, "ell")?.unwrap_or(0);
                let r = optional_int(&mut s, "kummer_exponent")?.unwrap_or(1);
                let ell = u32::try_from(ell).map_err(|_| ConfigError { line: s.line, message: "ell is too large".into() })?;
                group = Some(GroupSpec::new(p, ell, n).with_kummer_exponent(r));
                s.finish()?;
            }
            "base" => {
                base_genus = optional_int(&mut s, "genus")?.unwrap_or(0);
                genus_ert = optional_int(&mut s, "genus_ErT")?;
                s.finish()?;
            }
            "branch" => {
                let Some(g) = &group else { return err(s.line, "[branch] needs a preceding [group]") };
                let id = s.take("id").map(|x| x.1).unwrap_or_else(|| format!("b{}", branches.len()));
                let phi = optional_int(&mut s, "tame_phi")?.unwrap_or(0);
                let jumps = s.take("jumps").map(|(l, v)| ints(l, "jumps", &v)).transpose()?;
                let epsilon = optional_int(&mut s, "epsilon")?;
                let delta = optional_int(&mut s, "delta")?;
                let wild = match jumps {
                    Some(jumps) => {
                        let eps = match epsilon {
                            Some(e) => u32::try_from(e).map_err(|_| ConfigError { line: s.line, message: "epsilon is too large".into() })?,
                            None => jumps.iter().filter(|&&j| j > 0).count() as u32,
                        };
                        let delta = delta.unwrap_or_else(|| delta_from_jumps(g.p, &jumps));
                        Some(WildData { jumps, epsilon: eps, delta })
                    }
                    None if epsilon.is_some() || delta.is_some() => {
                        return err(s.line, "epsilon and delta need jumps");
                    }
                    None => None,
                };
                branches.push(BranchPoint { id, tame_phi: phi, wild });
                s.finish()?;
            }
            _ => curve_section = Some(s),
        }
    }
    let Some(group) = group else { return err(1, "missing [group] section") };
    let curve = match curve_section {
        Some(mut s) => {
            let values = |v: &str| v.split(',').filter(|x| !x.trim().is_empty()).map(str::to_string).collect::<Vec<_>>();
            let mut b_roots = Vec::new();
            if let Some((l, v)) = s.take("b_roots") {
                for item in values(&v) {
                    let parts = ints(l, "b_roots", &item.replace(':', ","))?;
                    let [beta, phi] = parts[..] else { return err(l, format!("b_roots entry '{item}' is not beta:phi")) };
                    b_roots.push((beta, phi));
                }
            }
            let mut f_terms = Vec::new();
            if let Some((l, v)) = s.take("f_terms") {
                for item in values(&v) {
                    let parts = ints(l, "f_terms", &item.replace(':', ","))?;
                    let [alpha, m, c] = parts[..] else { return err(l, format!("f_terms entry '{item}' is not alpha:m:c")) };
                    f_terms.push(FTerm { alpha, m, c });
                }
            }
            let q = optional_int(&mut s, "q")?;
            s.finish()?;
            let mut spec = CurveSpec::new(group.clone(), b_roots, f_terms);
            if let Some(q) = q {
                spec.q = q;
            }
            Some(spec)
        }
        None => None,
    };
    Ok(Config { group, base_genus, genus_ert, branches, curve })
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z6: &str = "[group]\np = 3\nell = 1\nn = 2\n\n[base]\ngenus = 0\n\n[branch]\nid = 0\ntame_phi = 1\njumps = 2\n\n[branch]\nid = inf\ntame_phi = 1\n";

    #[test]
    fn parses_tower() {
        let c = parse(Z6).unwrap();
        let t = c.tower().unwrap();
        assert_eq!(t.branch_points.len(), 2);
        assert_eq!(t.branch_points[0].wild, Some(WildData { jumps: vec![2], epsilon: 1, delta: 6 }));
        assert_eq!(t.genus_f().unwrap(), 1);
    }

    #[test]
    fn curve_only() {
        let c = parse("[group]\np=5\nell=1\nn=1\n[curve]\nf_terms = 0:3:1\n").unwrap();
        let t = c.tower().unwrap();
        assert_eq!(t.branch_points[0].wild.as_ref().unwrap().delta, 16);
        assert_eq!(c.curve.unwrap().q, 5);
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse("[group]\np = 3\nn = 2\nbogus = 1\n").unwrap_err();
        assert_eq!(e.line, 4);
        let e = parse("[group]\np = x\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse("[group]\np = 3\nn = 1\n[wat]\n").unwrap_err();
        assert_eq!(e.line, 4);
        let e = parse("p = 3\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse("[group]\np = 3\nn = 1\n[curve]\nb_roots = 1:2:3\n").unwrap_err();
        assert_eq!(e.line, 5);
        assert!(parse("[base]\ngenus = 1\n").is_err());
    }
}
