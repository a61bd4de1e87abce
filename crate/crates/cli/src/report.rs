use sha2::{Digest, Sha256};

/// Hex SHA-256 of the analysed input.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A table of result records plus free-form notes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub columns: Vec<&'static str>,
    pub records: Vec<Vec<String>>,
}

impl Section {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, record: Vec<String>) {
        debug_assert_eq!(record.len(), self.columns.len());
        self.records.push(record);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub kind: &'static str,
    pub digest: String,
    /// Lines shown above the tables in human output.
    pub summary: Vec<String>,
    pub sections: Vec<Section>,
    /// Lines shown below the tables in human output.
    pub notes: Vec<String>,
    /// Something the command checks did not hold.
    pub failed: bool,
}

impl Report {
    pub fn new(kind: &'static str, digest: String) -> Self {
        Self {
            kind,
            digest,
            summary: Vec::new(),
            sections: Vec::new(),
            notes: Vec::new(),
            failed: false,
        }
    }

    /// Tab-separated records, each table preceded by `#` header lines.
    pub fn machine(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            out.push_str(&format!("# {} input-sha256={}\n", self.kind, self.digest));
            out.push_str(&format!("# {}\n", s.columns.join("\t")));
            for r in &s.records {
                out.push_str(&r.join("\t"));
                out.push('\n');
            }
        }
        out
    }

    pub fn human(&self) -> String {
        let mut out = String::new();
        for line in &self.summary {
            out.push_str(line);
            out.push('\n');
        }
        for s in &self.sections {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(&table(s));
        }
        if !self.notes.is_empty() {
            out.push('\n');
            for line in &self.notes {
                out.push_str(line);
                out.push('\n');
            }
        }
        out
    }
}

fn table(s: &Section) -> String {
    let mut widths: Vec<usize> = s.columns.iter().map(|c| c.chars().count()).collect();
    for r in &s.records {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let row = |cells: Vec<&str>| {
        let last = cells.len() - 1;
        let mut line = String::new();
        for (k, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            line.push_str(cell);
            if k < last {
                line.push_str(&" ".repeat(w - cell.chars().count() + 2));
            }
        }
        line.trim_end().to_string() + "\n"
    };
    let mut out = row(s.columns.clone());
    out.push_str(&row(widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().iter().map(String::as_str).collect()));
    for r in &s.records {
        out.push_str(&row(r.iter().map(String::as_str).collect()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo", digest(b"abc"));
        r.summary.push("title".into());
        let mut s = Section::new(vec!["a", "long-column"]);
        s.push(vec!["xyz".into(), "1".into()]);
        r.sections.push(s);
        r.notes.push("done".into());
        r
    }

    #[test]
    fn digest_is_sha256() {
        assert_eq!(
            digest(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn machine_output_is_tab_separated() {
        let text = sample().machine();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# demo input-sha256=ba7816bf"));
        assert_eq!(lines[1], "# a\tlong-column");
        assert_eq!(lines[2], "xyz\t1");
    }

    #[test]
    fn human_output_aligns_columns() {
        assert_eq!(
            sample().human(),
            "title\n\na    long-column\n---  -----------\nxyz  1\n\ndone\n"
        );
    }
}
