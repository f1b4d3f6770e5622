//! The shipped desk corpus of unibranched polynomials over (Q, ord_p).
//!
//! One entry per line, `p | polynomial`; `#` starts a comment.

pub const ORE_CORPUS: &str = include_str!("../corpus/ore.txt");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub p: u64,
    pub polynomial: String,
}

pub fn parse(text: &str) -> Result<Vec<Entry>, String> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (p, g) = line.split_once('|').ok_or_else(|| format!("line {}: missing '|'", n + 1))?;
        let p = p.trim().parse().map_err(|_| format!("line {}: bad prime", n + 1))?;
        out.push(Entry { p, polynomial: g.trim().to_string() });
    }
    Ok(out)
}

pub fn ore() -> Vec<Entry> {
    parse(ORE_CORPUS).expect("shipped corpus parses")
}
