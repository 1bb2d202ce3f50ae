//! Report assembly and byte-stable serialization.
//!
//! Every float is written as `%.12e`; struct fields serialize in declaration
//! order and maps are sorted, so identical runs give identical bytes.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use apair_core::estimates::BoundCertificate;
use apair_core::profile::format_sci;
use apair_core::DecayProfile;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::config::RunConfig;
use crate::LabError;

/// Pretty JSON with floats in C-style scientific notation.
pub struct SciFormatter<'a> {
    inner: PrettyFormatter<'a>,
    pretty: bool,
}

impl SciFormatter<'_> {
    pub fn pretty() -> Self {
        Self {
            inner: PrettyFormatter::new(),
            pretty: true,
        }
    }

    pub fn compact() -> Self {
        Self {
            inner: PrettyFormatter::new(),
            pretty: false,
        }
    }
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                if self.pretty {
                    self.inner.$name(w $(, $arg)*)
                } else {
                    serde_json::ser::CompactFormatter.$name(w $(, $arg)*)
                }
            }
        )*
    };
}

impl Formatter for SciFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_sci(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    );
}

fn serialize_with<T: Serialize>(value: &T, formatter: SciFormatter<'_>) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, formatter);
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serialize_with(value, SciFormatter::pretty());
    s.push('\n');
    s
}

pub fn to_json_line<T: Serialize>(value: &T) -> String {
    serialize_with(value, SciFormatter::compact())
}

/// One named check with its pass count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    /// The statement being verified.
    pub reference: String,
    pub passed: usize,
    pub total: usize,
    pub pass: bool,
    /// Reported for information only; does not affect the exit status.
    pub informational: bool,
    pub measured: BTreeMap<String, Value>,
}

impl Check {
    pub fn new(id: &str, reference: &str, passed: usize, total: usize) -> Self {
        Self {
            id: id.into(),
            reference: reference.into(),
            passed,
            total,
            pass: total > 0 && passed == total,
            informational: false,
            measured: BTreeMap::new(),
        }
    }

    pub fn single(id: &str, reference: &str, pass: bool) -> Self {
        Self::new(id, reference, usize::from(pass), 1)
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    pub fn measure(mut self, key: &str, value: impl Serialize) -> Self {
        self.measured.insert(
            key.into(),
            serde_json::to_value(value).expect("serializable measurement"),
        );
        self
    }
}

/// Everything one experiment produced.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub profiles: Vec<(String, DecayProfile)>,
    pub certificates: Vec<BoundCertificate>,
    /// Additional CSV files: (file name, contents).
    pub tables: Vec<(String, String)>,
    pub details: BTreeMap<String, Value>,
}

impl Outcome {
    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        self.details
            .insert(key.into(), serde_json::to_value(value).expect("serializable detail"));
    }

    pub fn profile(&mut self, name: impl Into<String>, p: DecayProfile) {
        self.profiles.push((name.into(), p));
    }

    /// Every non-informational check and every certificate passed.
    pub fn pass(&self) -> bool {
        self.checks.iter().filter(|c| !c.informational).all(|c| c.pass) && self.certificates.iter().all(|c| c.pass)
    }

    pub fn get(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }
}

#[derive(Serialize)]
struct ProfileEntry<'a> {
    name: &'a str,
    file: String,
    exponent: f64,
    constant: f64,
    residual: f64,
    max_value: f64,
}

#[derive(Serialize)]
struct CertificateSummary {
    file: &'static str,
    total: usize,
    passed: usize,
    worst_margin: Option<f64>,
}

#[derive(Serialize)]
struct Report<'a> {
    experiment: String,
    seed: u64,
    pass: bool,
    checks_passed: usize,
    checks_total: usize,
    config: &'a RunConfig,
    checks: &'a [Check],
    certificates: CertificateSummary,
    profiles: Vec<ProfileEntry<'a>>,
    tables: Vec<&'a str>,
    details: &'a BTreeMap<String, Value>,
}

fn profile_file(name: &str) -> String {
    let clean: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("profile_{clean}.csv")
}

/// Renders every output file in memory: `(file name, contents)`.
pub fn render(outcome: &Outcome, config: &RunConfig) -> Result<Vec<(String, String)>, LabError> {
    if outcome.checks.is_empty() && outcome.certificates.is_empty() {
        return Err(LabError::EmptyResults);
    }
    let mut files = Vec::new();
    let mut profiles = Vec::new();
    for (name, p) in &outcome.profiles {
        let file = profile_file(name);
        if files.iter().any(|(f, _)| f == &file) {
            return Err(LabError::Internal(format!("duplicate profile file {file}")));
        }
        files.push((file.clone(), p.to_csv(format_sci)));
        profiles.push(ProfileEntry {
            name,
            file,
            exponent: p.fitted_exponent,
            constant: p.fitted_constant,
            residual: p.residual,
            max_value: p.max_value(),
        });
    }
    for (name, contents) in &outcome.tables {
        files.push((name.clone(), contents.clone()));
    }
    let mut jsonl = String::new();
    for c in &outcome.certificates {
        jsonl.push_str(&to_json_line(c));
        jsonl.push('\n');
    }
    files.push(("certificates.jsonl".into(), jsonl));
    let counted: Vec<&Check> = outcome.checks.iter().filter(|c| !c.informational).collect();
    let report = Report {
        experiment: config.experiment.name().into(),
        seed: config.seed,
        pass: outcome.pass(),
        checks_passed: counted.iter().filter(|c| c.pass).count(),
        checks_total: counted.len(),
        config,
        checks: &outcome.checks,
        certificates: CertificateSummary {
            file: "certificates.jsonl",
            total: outcome.certificates.len(),
            passed: outcome.certificates.iter().filter(|c| c.pass).count(),
            worst_margin: outcome.certificates.iter().map(|c| c.margin).reduce(f64::min),
        },
        profiles,
        tables: outcome.tables.iter().map(|(n, _)| n.as_str()).collect(),
        details: &outcome.details,
    };
    files.push(("report.json".into(), to_json_pretty(&report)));
    Ok(files)
}

/// Writes all files into `dir`. Each file goes to a temporary name first
/// and is renamed into place, so a failed run leaves no partial file.
pub fn emit_report(outcome: &Outcome, config: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>, LabError> {
    let files = render(outcome, config)?;
    let io_err = |path: &Path, e: io::Error| LabError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut staged = Vec::new();
    for (name, contents) in &files {
        let tmp = dir.join(format!(".{name}.tmp"));
        if let Err(e) = std::fs::write(&tmp, contents) {
            for (t, _) in &staged {
                let _ = std::fs::remove_file(t);
            }
            return Err(io_err(&tmp, e));
        }
        staged.push((tmp, dir.join(name)));
    }
    let mut written = Vec::new();
    for (tmp, dest) in staged {
        std::fs::rename(&tmp, &dest).map_err(|e| io_err(&dest, e))?;
        written.push(dest);
    }
    Ok(written)
}
