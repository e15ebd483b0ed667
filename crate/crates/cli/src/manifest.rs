//! Run manifests: `key = value` lines, `#` comments, `[section]` headers.
//!
//! Keys above the first section apply to every subcommand; a section named
//! after the subcommand overrides them. Command-line flags override both.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    /// section name ("" for the preamble) -> key -> (value, line)
    sections: BTreeMap<String, BTreeMap<String, (String, usize)>>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut sections: BTreeMap<String, BTreeMap<String, (String, usize)>> = BTreeMap::new();
        let mut current = String::new();
        sections.entry(current.clone()).or_default();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::Usage(format!("manifest line {lineno}: unterminated section header")))?;
                current = name.trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("manifest line {lineno}: expected `key = value`")))?;
            let k = k.trim().to_string();
            if k.is_empty() {
                return Err(CliError::Usage(format!("manifest line {lineno}: empty key")));
            }
            let section = sections.get_mut(&current).expect("section exists");
            if section.insert(k.clone(), (v.trim().to_string(), lineno)).is_some() {
                return Err(CliError::Usage(format!("manifest line {lineno}: duplicate key `{k}`")));
            }
        }
        Ok(Self { sections })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("cannot read manifest {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Preamble merged with `[section]`; unknown sections are ignored.
    pub fn view(&self, section: &str) -> Settings {
        let mut values = self.sections.get("").cloned().unwrap_or_default();
        if let Some(s) = self.sections.get(section) {
            values.extend(s.clone());
        }
        Settings { section: section.to_string(), values, used: Default::default() }
    }
}

pub const SECTIONS: [&str; 5] = ["simulate", "analyze", "experiment", "monitor", "report"];

/// Every key some subcommand reads; the preamble may hold any of them.
pub const KNOWN_KEYS: [&str; 33] = [
    "adf_lags",
    "alpha",
    "batch_size",
    "comparisons",
    "conditions",
    "data_seed",
    "dim",
    "epochs",
    "lags",
    "lambda",
    "learning_rate",
    "max_test",
    "max_train",
    "memorize_epochs",
    "n",
    "n_test_per_class",
    "n_train_per_class",
    "nodes",
    "parallel",
    "probe_size",
    "save_activations",
    "save_artifacts",
    "seed",
    "seeds",
    "spread",
    "test_images",
    "test_labels",
    "train_images",
    "train_labels",
    "validation_fraction",
    "width",
    "widths",
    "window",
];

/// Key lookup for one subcommand, tracking which keys were consumed so that
/// typos can be reported.
#[derive(Debug, Clone)]
pub struct Settings {
    section: String,
    values: BTreeMap<String, (String, usize)>,
    used: std::cell::RefCell<std::collections::BTreeSet<String>>,
}

impl Settings {
    pub fn empty(section: &str) -> Self {
        Manifest::default().view(section)
    }

    /// Flag values win over the file.
    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), (value.to_string(), 0));
    }

    pub fn set_opt<T: ToString>(&mut self, key: &str, value: Option<T>) {
        if let Some(v) = value {
            self.set(key, v);
        }
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.used.borrow_mut().insert(key.to_string());
        match self.values.get(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<T>().map(Some).map_err(|_| {
                let at = if *line == 0 { "command line".to_string() } else { format!("manifest line {line}") };
                CliError::Usage(format!("{at}: bad value `{v}` for `{key}`"))
            }),
        }
    }

    pub fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        self.get(key)?.ok_or_else(|| CliError::Usage(format!("[{}] `{key}` is required", self.section)))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError> {
        let Some(raw) = self.get::<String>(key)? else { return Ok(None) };
        raw.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<T>().map_err(|_| CliError::Usage(format!("bad list item `{s}` for `{key}`"))))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    /// Errors on keys of this subcommand's section that nothing read, on
    /// preamble keys no subcommand reads and on unknown section names.
    pub fn reject_unused(&self, manifest: &Manifest) -> Result<(), CliError> {
        for name in manifest.sections.keys().filter(|n| !n.is_empty()) {
            if !SECTIONS.contains(&name.as_str()) {
                return Err(CliError::Usage(format!("manifest: unknown section [{name}]")));
            }
        }
        if let Some((k, (_, line))) =
            manifest.sections.get("").into_iter().flatten().find(|(k, _)| !KNOWN_KEYS.contains(&k.as_str()))
        {
            return Err(CliError::Usage(format!("manifest line {line}: unknown key `{k}`")));
        }
        let used = self.used.borrow();
        if let Some(section) = manifest.sections.get(&self.section) {
            if let Some((k, (_, line))) = section.iter().find(|(k, _)| !used.contains(*k)) {
                return Err(CliError::Usage(format!("manifest line {line}: unknown key `{k}` in [{}]", self.section)));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str =
        "seed = 7\nwindow = 50 # shared\n\n[experiment]\nwidths = 16, 32\nwindow = 100\n[monitor]\nprobe_size = 20\n";

    #[test]
    fn sections_override_preamble() {
        let m = Manifest::parse(TEXT).unwrap();
        let e = m.view("experiment");
        assert_eq!(e.require::<u64>("seed").unwrap(), 7);
        assert_eq!(e.require::<usize>("window").unwrap(), 100);
        assert_eq!(e.list::<usize>("widths").unwrap(), Some(vec![16, 32]));
        assert_eq!(m.view("monitor").require::<usize>("window").unwrap(), 50);
        assert_eq!(m.view("monitor").get::<usize>("widths").unwrap(), None);
    }

    #[test]
    fn flags_win_and_typos_are_caught() {
        let m = Manifest::parse(TEXT).unwrap();
        let mut e = m.view("experiment");
        e.set("window", 10);
        assert_eq!(e.require::<usize>("window").unwrap(), 10);
        assert!(e.reject_unused(&m).is_err());
        e.list::<usize>("widths").unwrap();
        e.reject_unused(&m).unwrap();
        assert!(e.require::<u64>("lags").is_err());
    }

    #[test]
    fn preamble_typos_and_unknown_sections_are_caught() {
        let m = Manifest::parse("seed = 1\nlamda = 0.3\n").unwrap();
        assert!(m.view("simulate").reject_unused(&m).is_err());
        let m = Manifest::parse("seed = 1\n[experimnt]\nwidths = 8\n").unwrap();
        assert!(m.view("experiment").reject_unused(&m).is_err());
        // keys of other subcommands are fine in the preamble
        let m = Manifest::parse("seed = 1\nwidths = 8\n").unwrap();
        m.view("simulate").reject_unused(&m).unwrap();
    }

    #[test]
    fn malformed_lines() {
        assert!(Manifest::parse("seed 7").is_err());
        assert!(Manifest::parse("[x\n").is_err());
        assert!(Manifest::parse("a = 1\na = 2").is_err());
        let m = Manifest::parse("seed = x").unwrap();
        assert!(m.view("simulate").require::<u64>("seed").is_err());
    }
}
