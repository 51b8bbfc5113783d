use std::fs;
use std::path::PathBuf;

use clap::Args;
use echolab_core::{Morphism, Word};

use crate::CliError;

/// Where the morphism comes from.
#[derive(Debug, Args)]
pub struct Source {
    /// Built-in morphism: fib, trib or kbonacci:K
    #[arg(long, required_unless_present = "morphism", conflicts_with = "morphism")]
    pub builtin: Option<String>,
    /// Morphism JSON file, e.g. {"images": ["01", "0"]}
    #[arg(long)]
    pub morphism: Option<PathBuf>,
}

impl Source {
    pub fn resolve(&self) -> Result<Morphism, CliError> {
        match (&self.builtin, &self.morphism) {
            (Some(name), _) => builtin(name),
            (None, Some(path)) => Ok(Morphism::from_json_str(&read(path)?)?),
            (None, None) => Err(CliError::Usage("give --builtin or --morphism".into())),
        }
    }
}

pub fn builtin(name: &str) -> Result<Morphism, CliError> {
    match name {
        "fib" => Ok(Morphism::fibonacci()),
        "trib" => Ok(Morphism::tribonacci()),
        _ => {
            let k = name
                .strip_prefix("kbonacci:")
                .and_then(|k| k.parse::<usize>().ok())
                .ok_or_else(|| CliError::Usage(format!("unknown builtin {name:?}; expected fib, trib or kbonacci:K")))?;
            Ok(Morphism::kbonacci(k)?)
        }
    }
}

pub fn read(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })
}

pub fn write(path: &PathBuf, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.clone(), source })
}

pub fn prefix(m: &Morphism, digits: &str) -> Result<Word, CliError> {
    let w = Word::parse_digits(digits)?;
    w.check_alphabet(m.alphabet_size())?;
    Ok(w)
}
