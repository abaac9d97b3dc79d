use std::fs;
use std::path::Path;

use resknap_core::{parse_instance, Instance, Rat};

use crate::error::{CliError, CliResult};

pub fn read_instance(path: &Path) -> CliResult<Instance> {
    let bytes = fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_instance(&bytes).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Decimal when the value terminates in base 10, `p/q` otherwise. Both forms
/// parse back exactly.
pub fn format_number(x: &Rat) -> String {
    x.to_exact_decimal().unwrap_or_else(|| x.to_string())
}

/// Instance file text, one `size,value` line per item.
pub fn instance_text(instance: &Instance) -> String {
    instance
        .items
        .iter()
        .map(|x| format!("{},{}\n", format_number(&x.size), format_number(&x.value)))
        .collect()
}
