//! On-disk ball cache.
//!
//! Layout: magic, format version (u32), header length (u32), a JSON header
//! with the model descriptor, generator order, radius and element count, then
//! one `(parent rank: u32, letter: u16)` record per element, then the SHA-256
//! of everything before it. Elements are rebuilt from their parents, so the
//! file stores only the BFS tree.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::group::{enumerate_ball_with_budget, BallIndex, Element, GroupModel, Letter};

const MAGIC: &[u8; 8] = b"RDBBALL\0";
pub const CACHE_VERSION: u32 = 1;
const NO_PARENT: u32 = u32::MAX;

#[derive(Serialize, Deserialize, PartialEq, Debug)]
struct Header {
    descriptor: String,
    order: String,
    radius: usize,
    count: usize,
}

/// File name for a model and radius inside a cache directory.
pub fn cache_path(dir: &Path, model: &GroupModel, radius: usize) -> PathBuf {
    dir.join(format!("ball-{:016x}-r{radius}.bin", model.id().0))
}

pub fn encode_ball(ball: &BallIndex) -> Vec<u8> {
    let header = serde_json::to_vec(&Header {
        descriptor: ball.descriptor().to_string(),
        order: ball.order().to_string(),
        radius: ball.radius(),
        count: ball.len(),
    })
    .expect("header serializes");
    let mut out = Vec::with_capacity(16 + header.len() + 6 * ball.len() + 32);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    out.extend_from_slice(&(header.len() as u32).to_le_bytes());
    out.extend_from_slice(&header);
    for rank in 0..ball.len() {
        let (p, l) = match ball.parent(rank) {
            Some((p, l)) => (p as u32, l.0),
            None => (NO_PARENT, 0),
        };
        out.extend_from_slice(&p.to_le_bytes());
        out.extend_from_slice(&l.to_le_bytes());
    }
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

pub fn decode_ball(model: &GroupModel, bytes: &[u8]) -> Result<BallIndex> {
    let bad = |m: &str| Error::Integrity(format!("ball cache: {m}"));
    if bytes.len() < MAGIC.len() + 8 + 32 {
        return Err(bad("file is truncated"));
    }
    let (body, digest) = bytes.split_at(bytes.len() - 32);
    if Sha256::digest(body).as_slice() != digest {
        return Err(bad("checksum mismatch (truncated or corrupt)"));
    }
    if &body[..8] != MAGIC {
        return Err(bad("not a ball cache file"));
    }
    let u32_at = |at: usize| u32::from_le_bytes(body[at..at + 4].try_into().expect("4 bytes"));
    let version = u32_at(8);
    if version != CACHE_VERSION {
        return Err(bad(&format!("format version {version}, expected {CACHE_VERSION}")));
    }
    let hlen = u32_at(12) as usize;
    let start = 16 + hlen;
    if body.len() < start {
        return Err(bad("header is truncated"));
    }
    let header: Header = serde_json::from_slice(&body[16..start]).map_err(|e| bad(&e.to_string()))?;
    if header.descriptor != model.descriptor() {
        return Err(bad(&format!(
            "descriptor {} does not match {}",
            header.descriptor,
            model.descriptor()
        )));
    }
    if header.order != model.order_string() {
        return Err(bad(&format!(
            "generator order {} does not match {}",
            header.order,
            model.order_string()
        )));
    }
    let records = &body[start..];
    if records.len() != 6 * header.count {
        return Err(bad("record count does not match the header"));
    }
    let mut elements: Vec<Element> = Vec::with_capacity(header.count);
    let mut parents = Vec::with_capacity(header.count);
    for (rank, rec) in records.chunks_exact(6).enumerate() {
        let p = u32::from_le_bytes(rec[..4].try_into().expect("4 bytes"));
        let l = Letter(u16::from_le_bytes(rec[4..].try_into().expect("2 bytes")));
        if p == NO_PARENT {
            elements.push(Element::identity());
            parents.push(None);
            continue;
        }
        if p as usize >= rank || l.index() >= model.alphabet_len() {
            return Err(bad(&format!("record {rank} is invalid")));
        }
        let mut w = elements[p as usize].0.clone();
        w.push(l);
        elements.push(Element(w));
        parents.push(Some((p, l)));
    }
    BallIndex::from_parts(model, header.radius, elements, parents)
}

pub fn save_ball(ball: &BallIndex, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, encode_ball(ball))?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_ball(model: &GroupModel, path: &Path) -> Result<BallIndex> {
    decode_ball(model, &fs::read(path)?)
}

/// Loads `B(radius)` from the cache directory when present, otherwise
/// enumerates it and stores it there.
pub fn cached_ball(model: &GroupModel, radius: usize, budget: usize, dir: Option<&Path>) -> Result<BallIndex> {
    let Some(dir) = dir else {
        return enumerate_ball_with_budget(model, radius, budget);
    };
    let path = cache_path(dir, model, radius);
    if path.exists() {
        let ball = load_ball(model, &path)?;
        if ball.len() > budget {
            return Err(Error::Resource {
                what: format!("cached ball of radius {radius} in {}", model.descriptor()),
                budget,
            });
        }
        return Ok(ball);
    }
    let ball = enumerate_ball_with_budget(model, radius, budget)?;
    save_ball(&ball, &path)?;
    Ok(ball)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::enumerate_ball;

    #[test]
    fn round_trip() {
        let m = GroupModel::parse("free(2)").unwrap();
        let b = enumerate_ball(&m, 4).unwrap();
        let back = decode_ball(&m, &encode_ball(&b)).unwrap();
        assert_eq!(back.elements(), b.elements());
        assert!((0..b.len()).all(|k| back.parent(k) == b.parent(k)));
    }

    #[test]
    fn rejects_damage() {
        let m = GroupModel::parse("free(2)").unwrap();
        let bytes = encode_ball(&enumerate_ball(&m, 3).unwrap());
        assert!(matches!(
            decode_ball(&m, &bytes[..bytes.len() - 7]),
            Err(Error::Integrity(_))
        ));
        let mut flipped = bytes.clone();
        flipped[40] ^= 1;
        assert!(matches!(decode_ball(&m, &flipped), Err(Error::Integrity(_))));
        let other = GroupModel::with_order(m.family().clone(), "bBaA").unwrap();
        assert!(matches!(decode_ball(&other, &bytes), Err(Error::Integrity(_))));
    }
}
