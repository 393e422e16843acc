//! On-disk reuse of the two artifacts that dominate runtime: the window
//! enumeration and the stabilized weight table. Cache files carry an
//! FNV-1a hash of every config field the artifact depends on; a stale
//! hash means silent recomputation, never reuse.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use bconv_core::field::LatticeVector;
use bconv_core::limit::WeightTable;
use bconv_core::window::XBarWindow;

use crate::config::RunConfig;

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// The window depends on the polynomial, the free-direction choice, and
/// the bound. Caps only bound resources, they never change the result, so
/// they stay out of the key.
fn window_key(cfg: &RunConfig) -> u64 {
    let mut s = String::from("window v1");
    for c in &cfg.poly {
        s.push_str(&format!(" {c}"));
    }
    s.push_str(&format!(" free={:?} b={:016x}", cfg.free_override, cfg.b.to_bits()));
    fnv1a(s.as_bytes())
}

/// The weight table additionally depends on the stabilization depth. The
/// growth rate it normalizes by is recomputed each run (cheap) from the
/// same polynomial, so it adds nothing to the key.
fn ftable_key(cfg: &RunConfig) -> u64 {
    let mut s = String::from("ftable v1");
    for c in &cfg.poly {
        s.push_str(&format!(" {c}"));
    }
    s.push_str(&format!(
        " free={:?} b={:016x} n_stab={}",
        cfg.free_override,
        cfg.b.to_bits(),
        cfg.n_stab
    ));
    fnv1a(s.as_bytes())
}

fn cache_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out.join("cache")
}

pub fn window_path(cfg: &RunConfig) -> PathBuf {
    cache_dir(cfg).join(format!("window-{:016x}.txt", window_key(cfg)))
}

pub fn ftable_path(cfg: &RunConfig) -> PathBuf {
    cache_dir(cfg).join(format!("ftable-{:016x}.txt", ftable_key(cfg)))
}

fn coords_line(v: &LatticeVector) -> String {
    v.coords
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_coords(tokens: &[&str]) -> Option<LatticeVector> {
    let coords: Option<Vec<i64>> = tokens.iter().map(|t| t.parse().ok()).collect();
    Some(LatticeVector::from_slice(&coords?))
}

pub fn store_window(cfg: &RunConfig, w: &XBarWindow) -> std::io::Result<()> {
    let mut text = format!(
        "window v1 {:016x}\nb {:016x} depth {}\n",
        window_key(cfg),
        w.free_bound.to_bits(),
        w.generation_depth
    );
    for v in &w.points {
        text.push_str(&coords_line(v));
        text.push('\n');
    }
    fs::create_dir_all(cache_dir(cfg))?;
    fs::write(window_path(cfg), text)
}

pub fn load_window(cfg: &RunConfig) -> Option<XBarWindow> {
    let text = fs::read_to_string(window_path(cfg)).ok()?;
    let mut lines = text.lines();
    let header = lines.next()?;
    if header != format!("window v1 {:016x}", window_key(cfg)) {
        return None;
    }
    let meta: Vec<&str> = lines.next()?.split_whitespace().collect();
    if meta.len() != 4 || meta[0] != "b" || meta[2] != "depth" {
        return None;
    }
    let free_bound = f64::from_bits(u64::from_str_radix(meta[1], 16).ok()?);
    let generation_depth = meta[3].parse().ok()?;
    let mut points = BTreeSet::new();
    for line in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        points.insert(parse_coords(&tokens)?);
    }
    if points.is_empty() {
        return None;
    }
    Some(XBarWindow {
        points,
        free_bound,
        generation_depth,
    })
}

pub fn store_ftable(cfg: &RunConfig, t: &WeightTable) -> std::io::Result<()> {
    let mut text = format!(
        "ftable v1 {:016x}\nf0 {:016x} n_stab {} b {:016x} q {:016x} flagged {}\n",
        ftable_key(cfg),
        t.f0.to_bits(),
        t.n_stab,
        t.free_bound.to_bits(),
        t.q.to_bits(),
        t.flagged
    );
    for (v, log_w) in t.log_entries() {
        let gap = t.stab_gap.get(&v).copied().unwrap_or(0.0);
        text.push_str(&format!(
            "{} : {:016x} {:016x}\n",
            coords_line(&v),
            log_w.to_bits(),
            gap.to_bits()
        ));
    }
    fs::create_dir_all(cache_dir(cfg))?;
    fs::write(ftable_path(cfg), text)
}

pub fn load_ftable(cfg: &RunConfig) -> Option<WeightTable> {
    let text = fs::read_to_string(ftable_path(cfg)).ok()?;
    let mut lines = text.lines();
    let header = lines.next()?;
    if header != format!("ftable v1 {:016x}", ftable_key(cfg)) {
        return None;
    }
    let meta: Vec<&str> = lines.next()?.split_whitespace().collect();
    if meta.len() != 10 || meta[0] != "f0" {
        return None;
    }
    let f0 = f64::from_bits(u64::from_str_radix(meta[1], 16).ok()?);
    let n_stab = meta[3].parse().ok()?;
    let free_bound = f64::from_bits(u64::from_str_radix(meta[5], 16).ok()?);
    let q = f64::from_bits(u64::from_str_radix(meta[7], 16).ok()?);
    let flagged = meta[9].parse().ok()?;
    let mut log_entries = Vec::new();
    let mut gaps = Vec::new();
    for line in lines {
        let (coords, values) = line.split_once(" : ")?;
        let v = parse_coords(&coords.split_whitespace().collect::<Vec<_>>())?;
        let vals: Vec<&str> = values.split_whitespace().collect();
        if vals.len() != 2 {
            return None;
        }
        log_entries.push((v.clone(), f64::from_bits(u64::from_str_radix(vals[0], 16).ok()?)));
        gaps.push((v, f64::from_bits(u64::from_str_radix(vals[1], 16).ok()?)));
    }
    if log_entries.is_empty() {
        return None;
    }
    Some(WeightTable::from_parts(
        log_entries,
        gaps,
        f0,
        n_stab,
        free_bound,
        q,
        flagged,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_separate_the_fields_they_should() {
        let base = RunConfig::default();
        let mut other = base.clone();
        other.b = 100.0;
        assert_ne!(window_key(&base), window_key(&other));
        assert_ne!(ftable_key(&base), ftable_key(&other));
        // n_stab feeds only the table.
        let mut deeper = base.clone();
        deeper.n_stab = 30;
        assert_eq!(window_key(&base), window_key(&deeper));
        assert_ne!(ftable_key(&base), ftable_key(&deeper));
        // Caps change neither artifact.
        let mut capped = base.clone();
        capped.atom_cap = 1;
        capped.window_cap = 99;
        assert_eq!(window_key(&base), window_key(&capped));
        assert_eq!(ftable_key(&base), ftable_key(&capped));
    }

    #[test]
    fn fnv_vector() {
        // Published FNV-1a 64 test vector.
        assert_eq!(fnv1a(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a(b"a"), 0xaf63dc4c8601ec8c);
    }
}
