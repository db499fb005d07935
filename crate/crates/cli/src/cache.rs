//! JSON cache for class groups (keyed by `D`) and exact theta expansions
//! (keyed by `D`, character exponents, twist and `B`).
//!
//! Cached values go through the same validation as fresh ones, so a warm run
//! prints exactly what a cold run prints.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use dihedral::{
    theta_coeffs, ClassGroupRecord, CycElt, FormClassGroup, FundamentalDiscriminant,
    IdealCharacter, QExpansion,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
struct ThetaRecord {
    m: u64,
    a: Vec<Vec<i64>>,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let parent = path.parent().expect("cache paths have a parent");
    std::fs::create_dir_all(parent)
        .with_context(|| format!("creating cache directory {}", parent.display()))?;
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self { dir }
    }

    fn path(&self, kind: &str, key: &str) -> Option<PathBuf> {
        self.dir
            .as_ref()
            .map(|d| d.join(kind).join(format!("{key}.json")))
    }

    fn read<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Option<T>> {
        match std::fs::read(path) {
            Ok(bytes) => serde_json::from_slice(&bytes)
                .map(Some)
                .with_context(|| format!("corrupt cache entry {}", path.display())),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e).with_context(|| format!("reading {}", path.display())),
        }
    }

    pub fn class_group(&self, d: FundamentalDiscriminant) -> Result<Arc<FormClassGroup>> {
        let path = self.path("classgroup", &d.get().to_string());
        if let Some(path) = &path {
            if let Some(rec) = Self::read::<ClassGroupRecord>(path)? {
                let group = FormClassGroup::from_record(&rec)
                    .with_context(|| format!("invalid cache entry {}", path.display()))?;
                return Ok(Arc::new(group));
            }
        }
        let group = FormClassGroup::new(d)?;
        if let Some(path) = &path {
            write_atomic(path, &serde_json::to_vec(&group.to_record())?)?;
        }
        Ok(Arc::new(group))
    }

    pub fn theta(&self, character: &IdealCharacter, bound: u64) -> Result<QExpansion<CycElt>> {
        let chi = character.base();
        let exps: Vec<String> = chi.exponents().iter().map(u64::to_string).collect();
        let twist = match character.twist() {
            Some(aux) => format!("{}_{}", aux.lambda().x, aux.lambda().y),
            None => "none".into(),
        };
        let key = format!(
            "{}_{}_{}_{}",
            chi.discriminant(),
            exps.join("."),
            twist,
            bound
        );
        let path = self.path("theta", &key);
        let md = chi.modulus();
        if let Some(path) = &path {
            if let Some(rec) = Self::read::<ThetaRecord>(path)? {
                if rec.m != md.m() || rec.a.len() as u64 != bound + 1 {
                    bail!("cache entry {} does not match its key", path.display());
                }
                let coeffs = rec
                    .a
                    .into_iter()
                    .map(|c| CycElt::from_coeffs(md, c))
                    .collect::<dihedral::Result<Vec<_>>>()?;
                return Ok(QExpansion::new(coeffs));
            }
        }
        let f = theta_coeffs(character, bound)?;
        if let Some(path) = &path {
            let rec = ThetaRecord {
                m: md.m(),
                a: f.coeffs().iter().map(|c| c.coeffs().to_vec()).collect(),
            };
            write_atomic(path, &serde_json::to_vec(&rec)?)?;
        }
        Ok(f)
    }
}
