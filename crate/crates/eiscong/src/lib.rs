//! Command-line workbench over `eiscong-core`: data files, configuration,
//! command dispatch and the reproduction reports.

pub mod cli;
pub mod commands;
pub mod config;
pub mod load;
pub mod lvalue;
pub mod report;

use std::ffi::OsString;

use clap::ValueEnum;

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exit {
    Ok = 0,
    /// A congruence (or ratio check) failed.
    Fail = 1,
    /// Required data absent, unreadable or inconsistent.
    Miss = 2,
    /// The envelope exceeds the requested precision.
    Precision = 3,
    Usage = 4,
}

#[derive(Debug, thiserror::Error)]
#[error("{msg}")]
pub struct CliError {
    pub code: Exit,
    pub msg: String,
}

impl CliError {
    pub fn new(code: Exit, msg: impl Into<String>) -> CliError {
        CliError { code, msg: msg.into() }
    }

    pub fn usage(msg: impl Into<String>) -> CliError {
        CliError::new(Exit::Usage, msg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Md,
    Json,
    Plain,
}

/// What a command produced: the exit status and the text for stdout.
#[derive(Clone, Debug)]
pub struct Output {
    pub code: Exit,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    pub fn ok(stdout: String) -> Output {
        Output { code: Exit::Ok, stdout, stderr: String::new() }
    }

    pub fn with_code(code: Exit, stdout: String) -> Output {
        Output { code, stdout, stderr: String::new() }
    }
}

/// Pretty JSON with a trailing newline; big integers are already strings.
pub fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// Parse `argv` (program name first) and run; never exits the process.
pub fn run<I, T>(argv: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    use clap::Parser;
    let parsed = match cli::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Exit::Ok,
                _ => Exit::Usage,
            };
            let text = e.render().to_string();
            return if code == Exit::Ok {
                Output::ok(text)
            } else {
                Output { code, stdout: String::new(), stderr: text }
            };
        }
    };
    cli::dispatch(parsed)
}
