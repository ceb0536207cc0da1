//! Parameter files: a plain-text architecture header followed by the flat
//! parameter vector as little-endian `f64`.
//!
//! ```text
//! nqs-overlap-params 1
//! kind=rbm
//! sites=12
//! hidden=32
//! depth=1
//! seed=7
//! count=768
//! end
//! <count × 8 bytes>
//! ```

use std::fs;
use std::path::Path;

use super::{Ansatz, AnsatzKind, Arnn, Rbm};
use crate::error::{Error, Result};

const MAGIC: &str = "nqs-overlap-params 1";

/// Architecture descriptor stored alongside the parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchitectureHeader {
    pub kind: AnsatzKind,
    pub sites: usize,
    pub hidden: usize,
    pub depth: usize,
    pub seed: Option<u64>,
    pub count: usize,
}

impl ArchitectureHeader {
    pub fn describe(ansatz: &Ansatz, seed: Option<u64>) -> Self {
        use super::Nqs;
        let (hidden, depth) = match ansatz {
            Ansatz::Rbm(r) => (r.hidden(), 1),
            Ansatz::Arnn(a) => (a.hidden(), a.depth()),
        };
        Self {
            kind: ansatz.kind(),
            sites: ansatz.num_sites(),
            hidden,
            depth,
            seed,
            count: ansatz.parameter_count(),
        }
    }
}

pub fn to_bytes(ansatz: &Ansatz, seed: Option<u64>) -> Vec<u8> {
    let h = ArchitectureHeader::describe(ansatz, seed);
    let mut text = format!(
        "{MAGIC}\nkind={}\nsites={}\nhidden={}\ndepth={}\n",
        h.kind, h.sites, h.hidden, h.depth
    );
    if let Some(seed) = h.seed {
        text.push_str(&format!("seed={seed}\n"));
    }
    text.push_str(&format!("count={}\nend\n", h.count));
    let mut out = text.into_bytes();
    for p in ansatz.parameters() {
        out.extend_from_slice(&p.to_le_bytes());
    }
    out
}

pub fn from_bytes(bytes: &[u8]) -> Result<(Ansatz, ArchitectureHeader)> {
    let marker = b"\nend\n";
    let split = bytes
        .windows(marker.len())
        .position(|w| w == marker)
        .ok_or_else(|| Error::Format("missing `end` line".into()))?;
    let header = std::str::from_utf8(&bytes[..split])
        .map_err(|_| Error::Format("header is not UTF-8".into()))?;
    let body = &bytes[split + marker.len()..];

    let mut lines = header.lines();
    if lines.next() != Some(MAGIC) {
        return Err(Error::Format("bad magic line".into()));
    }
    let (mut kind, mut sites, mut hidden, mut depth, mut seed, mut count) =
        (None, None, None, None, None, None);
    for line in lines {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("expected key=value, got `{line}`")))?;
        let num = |v: &str| {
            v.parse::<u64>()
                .map_err(|_| Error::Format(format!("bad number for `{k}`: `{v}`")))
        };
        match k {
            "kind" => kind = Some(v.parse::<AnsatzKind>().map_err(|e| Error::Format(e.to_string()))?),
            "sites" => sites = Some(num(v)? as usize),
            "hidden" => hidden = Some(num(v)? as usize),
            "depth" => depth = Some(num(v)? as usize),
            "seed" => seed = Some(num(v)?),
            "count" => count = Some(num(v)? as usize),
            other => return Err(Error::Format(format!("unknown header key `{other}`"))),
        }
    }
    let missing = |name: &str| Error::Format(format!("header lacks `{name}`"));
    let h = ArchitectureHeader {
        kind: kind.ok_or_else(|| missing("kind"))?,
        sites: sites.ok_or_else(|| missing("sites"))?,
        hidden: hidden.ok_or_else(|| missing("hidden"))?,
        depth: depth.ok_or_else(|| missing("depth"))?,
        seed,
        count: count.ok_or_else(|| missing("count"))?,
    };
    if body.len() != 8 * h.count {
        return Err(Error::Format(format!(
            "expected {} parameter bytes, found {}",
            8 * h.count,
            body.len()
        )));
    }
    let params: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let ansatz = match h.kind {
        AnsatzKind::Rbm => {
            let template = Rbm::zeros(h.hidden, h.sites)?;
            Ansatz::Rbm(template.with_parameters(&params)?)
        }
        AnsatzKind::Arnn => Ansatz::Arnn(Arnn::from_parameters(h.sites, h.hidden, h.depth, &params)?),
    };
    Ok((ansatz, h))
}

pub fn save(path: impl AsRef<Path>, ansatz: &Ansatz, seed: Option<u64>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_bytes(ansatz, seed)).map_err(|e| Error::io(path, e))
}

pub fn load(path: impl AsRef<Path>) -> Result<(Ansatz, ArchitectureHeader)> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    from_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::init_random;

    #[test]
    fn roundtrip_both_kinds() {
        for kind in [AnsatzKind::Rbm, AnsatzKind::Arnn] {
            let a = init_random(kind, 7, 99).unwrap();
            let (b, h) = from_bytes(&to_bytes(&a, Some(99))).unwrap();
            assert_eq!(a, b);
            assert_eq!(h.seed, Some(99));
            assert_eq!(h.sites, 7);
        }
    }

    #[test]
    fn truncated_body_is_rejected() {
        let a = init_random(AnsatzKind::Rbm, 3, 1).unwrap();
        let mut bytes = to_bytes(&a, None);
        bytes.pop();
        assert!(matches!(from_bytes(&bytes), Err(Error::Format(_))));
    }

    #[test]
    fn file_roundtrip_and_io_error_context() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("psi.params");
        let a = init_random(AnsatzKind::Arnn, 5, 2).unwrap();
        save(&path, &a, None).unwrap();
        assert_eq!(load(&path).unwrap().0, a);
        let err = load(dir.path().join("missing")).unwrap_err();
        assert!(err.to_string().contains("missing"));
    }
}
