use std::fmt::Write as _;
use std::time::Duration;

use sha1::{Digest, Sha1};

/// Git blob id: SHA-1 of `"blob <len>\0" + content`.
pub fn blob_hash(content: &[u8]) -> String {
    let mut h = Sha1::new();
    h.update(format!("blob {}\0", content.len()).as_bytes());
    h.update(content);
    hex(&h.finalize())
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(2 * bytes.len()), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// One written artifact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub hash: String,
}

/// Hash over the sorted `name hash` lines of every artifact.
pub fn content_hash(artifacts: &[Artifact]) -> String {
    let mut lines: Vec<String> = artifacts.iter().map(|a| format!("{} {}\n", a.name, a.hash)).collect();
    lines.sort();
    blob_hash(lines.concat().as_bytes())
}

pub fn render(
    echo: &str,
    results: &[(String, String)],
    artifacts: &[Artifact],
    error: Option<&str>,
    exit_code: i32,
    wall: Duration,
) -> String {
    let mut out = String::from("[config]\n");
    out.push_str(echo);
    out.push_str("\n[results]\n");
    for (k, v) in results {
        let _ = writeln!(out, "{k} = {v}");
    }
    if let Some(e) = error {
        let _ = writeln!(out, "error = {}", e.replace('\n', " "));
    }
    let _ = writeln!(out, "exit_code = {exit_code}");
    out.push_str("\n[outputs]\n");
    for a in artifacts {
        let _ = writeln!(out, "{} = {}", a.name, a.hash);
    }
    let _ = writeln!(out, "content_hash = {}", content_hash(artifacts));
    let _ = writeln!(out, "wall_time_s = {:.6}", wall.as_secs_f64());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_git_hash_object() {
        // `printf 'hello\n' | git hash-object --stdin`
        assert_eq!(blob_hash(b"hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
        assert_eq!(blob_hash(b""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    }

    #[test]
    fn content_hash_ignores_order() {
        let a = Artifact {
            name: "a.csv".into(),
            hash: blob_hash(b"1"),
        };
        let b = Artifact {
            name: "b.csv".into(),
            hash: blob_hash(b"2"),
        };
        assert_eq!(content_hash(&[a.clone(), b.clone()]), content_hash(&[b, a]));
    }
}
