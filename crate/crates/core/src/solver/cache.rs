//! Concurrent memo table and its line-oriented persistence format.
//!
//! ```text
//! liargame-cache v1 l=1 k=16
//! 0,2=1
//! 0,3=2
//! ...
//! ```
//!
//! Entries are sorted by their count vector (numeric, component 0 most
//! significant).

use std::io::{BufRead, Write};

use dashmap::DashMap;

use crate::error::{Error, Result};
use crate::game::{parse_literal_at, Params};

pub const CACHE_VERSION: &str = "v1";
const MAGIC: &str = "liargame-cache";

/// Exact values keyed by count vector, for one `(lies, cap)` family.
#[derive(Debug)]
pub struct MemoCache {
    params: Params,
    entries: DashMap<Vec<u32>, u32>,
}

impl MemoCache {
    pub fn new(params: Params) -> Self {
        MemoCache {
            params,
            entries: DashMap::new(),
        }
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn get(&self, counts: &[u32]) -> Option<u32> {
        self.entries.get(counts).map(|v| *v)
    }

    /// Inserts unless present; returns the stored value and whether this call
    /// inserted it.
    pub fn insert_if_absent(&self, counts: &[u32], value: u32) -> (u32, bool) {
        use dashmap::mapref::entry::Entry;
        match self.entries.entry(counts.to_vec()) {
            Entry::Occupied(e) => (*e.get(), false),
            Entry::Vacant(e) => {
                e.insert(value);
                (value, true)
            }
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Snapshot in file order.
    pub fn sorted_entries(&self) -> Vec<(Vec<u32>, u32)> {
        let mut out: Vec<_> = self
            .entries
            .iter()
            .map(|e| (e.key().clone(), *e.value()))
            .collect();
        out.sort();
        out
    }

    pub fn header(params: &Params) -> String {
        format!("{MAGIC} {CACHE_VERSION} l={} k={}", params.lies, params.cap)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::header(&self.params))?;
        for (counts, value) in self.sorted_entries() {
            let literal: Vec<String> = counts.iter().map(u32::to_string).collect();
            writeln!(out, "{}={value}", literal.join(","))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("cache text is ASCII")
    }

    /// Reads a cache file. With `expected` set, a header for other parameters
    /// is rejected.
    pub fn read_from<R: BufRead>(input: R, expected: Option<Params>) -> Result<MemoCache> {
        let mut lines = input.lines();
        let header = lines.next().transpose()?.ok_or(Error::Cache {
            line: 1,
            message: "empty cache file".into(),
        })?;
        let params = parse_header(&header)?;
        if let Some(want) = expected {
            if want != params {
                return Err(Error::Cache {
                    line: 1,
                    message: format!(
                        "header is for l={} k={}, expected l={} k={}",
                        params.lies, params.cap, want.lies, want.cap
                    ),
                });
            }
        }
        let cache = MemoCache::new(params);
        let mut previous: Option<Vec<u32>> = None;
        for (idx, line) in lines.enumerate() {
            let line_no = idx + 2;
            let line = line?;
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Cache {
                line: line_no,
                message: format!("expected `counts=value`, got `{line}`"),
            })?;
            let counts = parse_literal_at(key, line_no).map_err(|e| Error::Cache {
                line: line_no,
                message: e.to_string(),
            })?;
            if counts.len() != params.width() {
                return Err(Error::Cache {
                    line: line_no,
                    message: format!(
                        "state has {} components, header implies {}",
                        counts.len(),
                        params.width()
                    ),
                });
            }
            let value: u32 = value.parse().map_err(|_| Error::Cache {
                line: line_no,
                message: format!("bad value `{value}`"),
            })?;
            if let Some(prev) = &previous {
                if prev >= &counts {
                    return Err(Error::Cache {
                        line: line_no,
                        message: "entries out of order or duplicated".into(),
                    });
                }
            }
            cache.entries.insert(counts.clone(), value);
            previous = Some(counts);
        }
        Ok(cache)
    }

    pub fn from_text(text: &str, expected: Option<Params>) -> Result<MemoCache> {
        Self::read_from(text.as_bytes(), expected)
    }
}

fn parse_header(header: &str) -> Result<Params> {
    let bad = |message: String| Error::Cache { line: 1, message };
    let fields: Vec<&str> = header.split(' ').collect();
    match fields.as_slice() {
        [magic, version, l, k] if *magic == MAGIC => {
            if *version != CACHE_VERSION {
                return Err(bad(format!("unsupported cache version `{version}`")));
            }
            let lies = l
                .strip_prefix("l=")
                .and_then(|v| v.parse::<usize>().ok())
                .ok_or_else(|| bad(format!("bad lie field `{l}`")))?;
            let cap = k
                .strip_prefix("k=")
                .and_then(|v| v.parse::<u32>().ok())
                .filter(|&c| c >= 1)
                .ok_or_else(|| bad(format!("bad cap field `{k}`")))?;
            Ok(Params { lies, cap })
        }
        _ => Err(bad(format!("not a liargame cache header: `{header}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> MemoCache {
        let c = MemoCache::new(Params::new(1, 2).unwrap());
        c.insert_if_absent(&[2, 0], 3);
        c.insert_if_absent(&[0, 2], 1);
        c.insert_if_absent(&[1, 1], 2);
        c.insert_if_absent(&[10, 1], 9);
        c
    }

    #[test]
    fn text_is_sorted_numerically() {
        assert_eq!(
            sample().to_text(),
            "liargame-cache v1 l=1 k=2\n0,2=1\n1,1=2\n2,0=3\n10,1=9\n"
        );
    }

    #[test]
    fn insert_if_absent_keeps_first() {
        let c = sample();
        assert_eq!(c.insert_if_absent(&[2, 0], 7), (3, false));
        assert_eq!(c.get(&[2, 0]), Some(3));
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let text = sample().to_text();
        let back = MemoCache::from_text(&text, None).unwrap();
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn wrong_header_rejected() {
        let text = sample().to_text();
        let err = MemoCache::from_text(&text, Some(Params::new(2, 2).unwrap())).unwrap_err();
        assert!(matches!(err, Error::Cache { line: 1, .. }));
        let bumped = text.replace("v1", "v9");
        assert!(MemoCache::from_text(&bumped, None).is_err());
        assert!(MemoCache::from_text("hello\n", None).is_err());
        assert!(MemoCache::from_text("", None).is_err());
    }

    #[test]
    fn malformed_lines_report_line_number() {
        let text = "liargame-cache v1 l=1 k=2\n0,2=1\n1,1:2\n";
        assert_eq!(
            MemoCache::from_text(text, None).unwrap_err(),
            Error::Cache {
                line: 3,
                message: "expected `counts=value`, got `1,1:2`".into()
            }
        );
        let unordered = "liargame-cache v1 l=1 k=2\n1,1=2\n0,2=1\n";
        assert!(matches!(
            MemoCache::from_text(unordered, None),
            Err(Error::Cache { line: 3, .. })
        ));
        let narrow = "liargame-cache v1 l=1 k=2\n2=1\n";
        assert!(matches!(
            MemoCache::from_text(narrow, None),
            Err(Error::Cache { line: 2, .. })
        ));
    }
}
