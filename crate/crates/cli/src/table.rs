//! Kernel table files: CSV with a `#` metadata preamble.
//!
//! The preamble records kind, μ, quadrature settings and tool version, and
//! ends with a SHA-256 digest of every other line of the file.

use std::path::PathBuf;

use diwt::kernels::{KernelEntry, KernelKind, KernelTable, KernelTableSpec};
use diwt::quad::QuadSpec;
use diwt::specfun::ComplexIndex;
use num_complex::Complex64;

use crate::failure::Failure;
use crate::output::{fmt_f64, sha256_hex, Csv};

pub const CACHE_ENV: &str = "DIWT_CACHE_DIR";
const TITLE: &str = "# diwt kernel table";
const DIGEST_KEY: &str = "sha256";
const HEADER: [&str; 7] = ["index_re", "index_im", "x", "value_re", "value_im", "error_estimate", "status"];

/// Directory for kernel tables: `$DIWT_CACHE_DIR`, else the user cache
/// directory.
pub fn cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os(CACHE_ENV).filter(|d| !d.is_empty()) {
        return PathBuf::from(dir);
    }
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME").filter(|d| !d.is_empty()) {
        return PathBuf::from(dir).join("diwt");
    }
    match std::env::var_os("HOME") {
        Some(home) => PathBuf::from(home).join(".cache").join("diwt"),
        None => PathBuf::from(".diwt-cache"),
    }
}

/// Default file name of a table, keyed by its specification.
pub fn cache_path(spec: &KernelTableSpec) -> PathBuf {
    let key = serde_json::to_vec(spec).expect("serializable spec");
    let digest = sha256_hex(&key);
    cache_dir().join(format!("{}-{}.csv", spec.kind.name(), &digest[..16]))
}

fn preamble(kind: KernelKind, mu: f64, quad: &QuadSpec, version: &str) -> String {
    let quad = serde_json::to_string(quad).expect("serializable quad spec");
    format!(
        "{TITLE}\n# kind: {}\n# mu: {}\n# quad: {quad}\n# version: {version}\n",
        kind.name(),
        fmt_f64(mu)
    )
}

/// Serializes a table; `decode` of the result restores it exactly.
pub fn encode(table: &KernelTable) -> Vec<u8> {
    let spec = &table.spec;
    let mut csv = Csv::new(&HEADER);
    for e in &table.entries {
        let (value, estimate) = match e.value {
            Some(v) => (v, e.error_estimate.unwrap_or(f64::NAN)),
            None => (Complex64::new(f64::NAN, f64::NAN), f64::NAN),
        };
        let status = match &e.failure {
            Some(msg) => format!("failed: {msg}"),
            None => "ok".to_string(),
        };
        csv.row([
            fmt_f64(e.index.re),
            fmt_f64(e.index.im),
            fmt_f64(e.x),
            fmt_f64(value.re),
            fmt_f64(value.im),
            fmt_f64(estimate),
            status,
        ]);
    }
    let head = preamble(spec.kind, spec.mu, &spec.quad, &table.version);
    let body = csv.into_bytes();
    let mut signed = head.clone().into_bytes();
    signed.extend_from_slice(&body);
    let digest = sha256_hex(&signed);
    let mut out = head.into_bytes();
    out.extend_from_slice(format!("# {DIGEST_KEY}: {digest}\n").as_bytes());
    out.extend_from_slice(&body);
    out
}

fn corrupt(msg: impl Into<String>) -> Failure {
    Failure::Persistence(format!("corrupt kernel table: {}", msg.into()))
}

fn parse_f64(field: &str) -> Result<f64, Failure> {
    field.parse().map_err(|_| corrupt(format!("not a number: {field:?}")))
}

/// Parses and verifies a table file.
pub fn decode(bytes: &[u8]) -> Result<KernelTable, Failure> {
    let text = std::str::from_utf8(bytes).map_err(|_| corrupt("not UTF-8"))?;
    let mut signed = String::with_capacity(text.len());
    let mut digest = None;
    let mut meta = Vec::new();
    let mut body_start = text.len();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        if !line.starts_with('#') {
            body_start = offset;
            break;
        }
        offset += line.len();
        let content = line.trim_end_matches('\n');
        if let Some(d) = content.strip_prefix(&format!("# {DIGEST_KEY}: ")) {
            if digest.replace(d.to_string()).is_some() {
                return Err(corrupt("duplicate digest"));
            }
            continue;
        }
        signed.push_str(line);
        meta.push(content);
    }
    signed.push_str(&text[body_start..]);
    let digest = digest.ok_or_else(|| corrupt("missing digest"))?;
    if sha256_hex(signed.as_bytes()) != digest {
        return Err(corrupt("digest mismatch"));
    }
    if meta.first() != Some(&TITLE) {
        return Err(corrupt("missing title line"));
    }
    let field = |key: &str| -> Result<&str, Failure> {
        let prefix = format!("# {key}: ");
        meta.iter()
            .find_map(|l| l.strip_prefix(&prefix))
            .ok_or_else(|| corrupt(format!("missing {key}")))
    };
    let kind = KernelKind::parse(field("kind")?).ok_or_else(|| corrupt("unknown kind"))?;
    let mu = parse_f64(field("mu")?)?;
    let quad: QuadSpec = serde_json::from_str(field("quad")?).map_err(|e| corrupt(format!("quad: {e}")))?;
    let version = field("version")?.to_string();

    let mut reader = csv::ReaderBuilder::new().from_reader(&bytes[body_start..]);
    let header = reader.headers().map_err(|e| corrupt(e.to_string()))?.clone();
    if header.iter().ne(HEADER) {
        return Err(corrupt("unexpected column header"));
    }
    let mut entries = Vec::new();
    for record in reader.records() {
        let r = record.map_err(|e| corrupt(e.to_string()))?;
        let num = |i: usize| parse_f64(&r[i]);
        let index = ComplexIndex::new(num(0)?, num(1)?);
        let x = num(2)?;
        let status = &r[6];
        let entry = if status == "ok" {
            KernelEntry {
                index,
                x,
                value: Some(Complex64::new(num(3)?, num(4)?)),
                error_estimate: Some(num(5)?),
                failure: None,
            }
        } else {
            let msg = status.strip_prefix("failed: ").ok_or_else(|| corrupt("bad status"))?;
            KernelEntry {
                index,
                x,
                value: None,
                error_estimate: None,
                failure: Some(msg.to_string()),
            }
        };
        entries.push(entry);
    }

    // rows must be the full index-major product of indices and grid
    let mut indices: Vec<ComplexIndex> = Vec::new();
    for e in &entries {
        if indices.last() != Some(&e.index) {
            indices.push(e.index);
        }
    }
    let grid: Vec<f64> = entries
        .iter()
        .take_while(|e| Some(&e.index) == indices.first())
        .map(|e| e.x)
        .collect();
    let consistent = entries.len() == indices.len() * grid.len()
        && entries.iter().enumerate().all(|(k, e)| {
            e.index == indices[k / grid.len()] && e.x.to_bits() == grid[k % grid.len()].to_bits()
        });
    if !consistent {
        return Err(corrupt("rows do not form an index-by-grid table"));
    }
    let spec = KernelTableSpec {
        kind,
        mu,
        indices,
        grid,
        quad,
    };
    spec.validate().map_err(|e| corrupt(e.to_string()))?;
    Ok(KernelTable { spec, entries, version })
}

#[cfg(test)]
mod tests {
    use super::*;
    use diwt::kernels::build_kernel_table;

    fn sample() -> KernelTable {
        build_kernel_table(&KernelTableSpec {
            kind: KernelKind::Psi,
            mu: 0.25,
            indices: vec![ComplexIndex::real(1.0), ComplexIndex::real(0.5)],
            grid: vec![1.0, 2.0],
            quad: QuadSpec::default(),
        })
        .unwrap()
    }

    #[test]
    fn encode_decode_round_trip() {
        let table = sample();
        assert_eq!(table.failed(), 2);
        let bytes = encode(&table);
        let back = decode(&bytes).unwrap();
        assert_eq!(back, table);
        assert_eq!(encode(&back), bytes);
    }

    #[test]
    fn tampering_is_detected() {
        let bytes = encode(&sample());
        let text = String::from_utf8(bytes).unwrap();
        for tampered in [
            text.replace("# mu: 2.5", "# mu: 3.5"),
            text.replace("index_re", "index_rx"),
            text.replacen("1.0000000000000000e0", "1.0000000000000001e0", 3),
        ] {
            assert_ne!(tampered, text);
            assert!(matches!(decode(tampered.as_bytes()), Err(Failure::Persistence(_))));
        }
        assert!(decode(b"x,y\n1,2\n").is_err());
    }
}
