//! On-disk zero cache, one CSV per (primitive character, height, engine
//! version) with the certificate in a JSON sidecar.

use crate::error::CliError;
use crate::output::fmt_f;
use lowlying::characters::DirichletCharacter;
use lowlying::lfunction::{find_zeros, ZeroSet, ENGINE_VERSION};
use lowlying::Result;
use std::path::{Path, PathBuf};

pub const ZERO_HEADER: [&str; 5] = ["q", "chi_index", "conductor", "parity", "ordinate"];

pub struct ZeroCache {
    dir: Option<PathBuf>,
}

impl ZeroCache {
    /// `None` disables the cache.
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self { dir: dir.map(|d| d.join(format!("zeros-v{ENGINE_VERSION}"))) }
    }

    fn paths(&self, chi: &DirichletCharacter, height: f64) -> Option<(PathBuf, PathBuf)> {
        let dir = self.dir.as_ref()?;
        let stem = format!("q{}_chi{}_T{}", chi.modulus(), chi.index(), height);
        Some((dir.join(format!("{stem}.csv")), dir.join(format!("{stem}.cert.json"))))
    }

    /// Zeros of a primitive character, from disk when present.
    pub fn zeros(&self, chi: &DirichletCharacter, height: f64) -> Result<ZeroSet> {
        let Some((csv_path, cert_path)) = self.paths(chi, height) else {
            return find_zeros(chi, height);
        };
        if let Some(z) = read_entry(&csv_path, &cert_path) {
            return Ok(z);
        }
        let z = find_zeros(chi, height)?;
        // A failed write only costs a recomputation next time.
        let _ = write_entry(&csv_path, &cert_path, &z);
        Ok(z)
    }
}

pub fn zero_rows(q: u64, index: usize, z: &ZeroSet) -> Vec<Vec<String>> {
    z.ordinates
        .iter()
        .map(|&g| {
            vec![
                q.to_string(),
                index.to_string(),
                z.conductor.to_string(),
                z.parity.to_string(),
                fmt_f(g),
            ]
        })
        .collect()
}

fn write_entry(csv_path: &Path, cert_path: &Path, z: &ZeroSet) -> std::result::Result<(), CliError> {
    std::fs::create_dir_all(csv_path.parent().expect("cache file has a parent"))?;
    let mut w = csv::Writer::from_path(csv_path)?;
    w.write_record(ZERO_HEADER)?;
    for r in zero_rows(z.modulus, z.index, z) {
        w.write_record(&r)?;
    }
    w.flush()?;
    let meta = ZeroSet { ordinates: Vec::new(), ..z.clone() };
    std::fs::write(cert_path, serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

fn read_entry(csv_path: &Path, cert_path: &Path) -> Option<ZeroSet> {
    let meta: ZeroSet = serde_json::from_str(&std::fs::read_to_string(cert_path).ok()?).ok()?;
    let mut r = csv::Reader::from_path(csv_path).ok()?;
    let mut ordinates = Vec::new();
    for rec in r.records() {
        ordinates.push(rec.ok()?.get(4)?.parse::<f64>().ok()?);
    }
    if ordinates.len() != meta.certificate.found {
        return None;
    }
    Some(ZeroSet { ordinates, ..meta })
}

/// Adapter for the family zero sum.
pub fn provider(cache: &ZeroCache) -> impl Fn(&DirichletCharacter, f64) -> Result<ZeroSet> + Sync + '_ {
    move |chi, t| cache.zeros(chi, t)
}
