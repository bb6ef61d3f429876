//! `compliance` command-line tool.
//!
//! Exit codes: 0 success, 1 validation or data failure, 2 usage error,
//! 3 I/O failure. Every failure writes exactly one JSON line
//! `{"code","message","details"?}` to stderr.

mod text;

use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use compliance_core::assessment::parse_assessment;
use compliance_core::checklist::{parse_checklist, DEFAULT_CHECKLIST_JSON};
use compliance_core::cube::serialize_turtle;
use compliance_core::period::Period;
use compliance_core::store::{Registration, Store, JOURNAL_FILE};
use compliance_core::trend::{benchmark, benchmark_json};
use compliance_core::validation::{is_identifier, Issue};
use compliance_service::{ApiError, ServiceConfig};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Parser)]
#[command(name = "compliance", version, about = "GDPR self-assessment scoring, reporting and export")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Checklist documents.
    #[command(subcommand)]
    Checklist(ChecklistCommand),
    /// Assessment submissions.
    #[command(subcommand)]
    Assess(AssessCommand),
    /// Score the latest assessment for one organisation and month.
    Report {
        #[command(flatten)]
        store: StoreArgs,
        #[arg(long)]
        org: String,
        #[arg(long)]
        period: Period,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Monthly total and section scores for one organisation.
    Trend {
        #[command(flatten)]
        store: StoreArgs,
        #[arg(long)]
        org: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Rank organisations by their latest total score.
    Benchmark {
        #[command(flatten)]
        store: StoreArgs,
        /// Comma-separated organisation ids.
        #[arg(long, value_delimiter = ',', required = true)]
        orgs: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Export data.
    #[command(subcommand)]
    Export(ExportCommand),
    /// Serve the HTTP API.
    Serve {
        #[command(flatten)]
        store: StoreArgs,
        #[arg(long)]
        listen: SocketAddr,
        /// Prefix for minted cube IRIs. Defaults to http://{listen}.
        #[arg(long)]
        base_iri: Option<String>,
    },
}

#[derive(Subcommand)]
enum ChecklistCommand {
    /// Check a checklist document and print its validation report.
    Validate { file: PathBuf },
    /// Register a checklist version in a data directory.
    Register {
        #[command(flatten)]
        store: StoreArgs,
        file: PathBuf,
    },
    /// Print the shipped default checklist.
    Default,
}

#[derive(Subcommand)]
enum AssessCommand {
    /// Validate and append an assessment; prints the revision.
    Submit {
        #[command(flatten)]
        store: StoreArgs,
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum ExportCommand {
    /// Write an organisation's score series as Turtle.
    Cube {
        #[command(flatten)]
        store: StoreArgs,
        #[arg(long)]
        org: String,
        #[arg(long)]
        base_iri: String,
        /// Output file, `-` for stdout.
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct StoreArgs {
    #[arg(long)]
    data_dir: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Serialize)]
struct ErrorLine<'a> {
    code: &'a str,
    message: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    details: Option<&'a [Issue]>,
}

struct Failure {
    exit: i32,
    error: ApiError,
}

impl Failure {
    fn io(context: impl std::fmt::Display, e: std::io::Error) -> Self {
        Self {
            exit: EXIT_IO,
            error: ApiError::internal(format!("{context}: {e}")),
        }
        .with_code("io")
    }

    fn invalid(code: &str, message: impl Into<String>) -> Self {
        Self {
            exit: EXIT_INVALID,
            error: ApiError::bad_request(code, message),
        }
    }

    fn with_code(mut self, code: &str) -> Self {
        self.error.code = code.to_owned();
        self
    }

    fn line(&self) -> String {
        serde_json::to_string(&ErrorLine {
            code: &self.error.code,
            message: &self.error.message,
            details: self.error.details.as_deref(),
        })
        .expect("error lines serialize infallibly")
    }
}

impl From<compliance_core::Error> for Failure {
    fn from(e: compliance_core::Error) -> Self {
        let exit = match e {
            compliance_core::Error::Io(_) | compliance_core::Error::CorruptJournal { .. } => EXIT_IO,
            _ => EXIT_INVALID,
        };
        Self {
            exit,
            error: ApiError::from(&e),
        }
    }
}

type Outcome = Result<(), Failure>;

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let rendered = e.to_string();
            let message = rendered
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ")
                .to_owned();
            let failure = Failure {
                exit: EXIT_USAGE,
                error: ApiError::bad_request("usage", message),
            };
            let _ = writeln!(stderr, "{}", failure.line());
            return EXIT_USAGE;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            let _ = writeln!(stderr, "{}", failure.line());
            failure.exit
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::io(path.display(), e))
}

fn emit(stdout: &mut dyn Write, text: &str) -> Outcome {
    stdout
        .write_all(text.as_bytes())
        .and_then(|()| stdout.flush())
        .map_err(|e| Failure::io("stdout", e))
}

/// Opens an existing data directory for reading.
fn open_existing(args: &StoreArgs) -> Result<Store, Failure> {
    let journal = args.data_dir.join(JOURNAL_FILE);
    if !journal.is_file() {
        return Err(Failure::io(
            args.data_dir.display(),
            std::io::Error::new(std::io::ErrorKind::NotFound, "not a compliance data directory"),
        ));
    }
    Ok(Store::open(&args.data_dir)?)
}

fn open_or_create(args: &StoreArgs) -> Result<Store, Failure> {
    Ok(Store::open(&args.data_dir)?)
}

fn check_org(org: &str) -> Outcome {
    if is_identifier(org) {
        Ok(())
    } else {
        Err(Failure::invalid("bad-org-id", format!("invalid organisation id {org:?}")))
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("documents serialize infallibly");
    out.push('\n');
    out
}

#[derive(Serialize)]
struct Registered<'a> {
    id: &'a str,
    version: &'a str,
    created: bool,
}

fn execute(command: Command, stdout: &mut dyn Write) -> Outcome {
    match command {
        Command::Checklist(ChecklistCommand::Validate { file }) => {
            let checklist = parse_checklist(&read_file(&file)?)?;
            let report = compliance_core::checklist::validate_checklist(&checklist);
            emit(stdout, &pretty(&report))
        }
        Command::Checklist(ChecklistCommand::Register { store, file }) => {
            let checklist = parse_checklist(&read_file(&file)?)?;
            let outcome = open_or_create(&store)?.register_checklist(&checklist)?;
            emit(
                stdout,
                &pretty(&Registered {
                    id: &checklist.id,
                    version: &checklist.version,
                    created: outcome == Registration::Created,
                }),
            )
        }
        Command::Checklist(ChecklistCommand::Default) => emit(stdout, DEFAULT_CHECKLIST_JSON),
        Command::Assess(AssessCommand::Submit { store, file }) => {
            let assessment = parse_assessment(&read_file(&file)?)?;
            let revision = open_or_create(&store)?.submit_assessment(assessment)?;
            emit(stdout, &format!("{}\n", serde_json::json!({ "revision": revision })))
        }
        Command::Report {
            store,
            org,
            period,
            format,
        } => {
            check_org(&org)?;
            let report = open_existing(&store)?.snapshot().report(&org, period)?;
            match format {
                Format::Json => emit(stdout, &report.to_json()),
                Format::Text => emit(stdout, &text::report(&report)),
            }
        }
        Command::Trend { store, org, format } => {
            check_org(&org)?;
            let series = open_existing(&store)?.snapshot().trend(&org)?;
            match format {
                Format::Json => emit(stdout, &series.to_json()),
                Format::Text => emit(stdout, &text::trend(&series)),
            }
        }
        Command::Benchmark { store, orgs, format } => {
            let orgs: Vec<String> = orgs.into_iter().map(|o| o.trim().to_owned()).filter(|o| !o.is_empty()).collect();
            if orgs.is_empty() {
                return Err(Failure {
                    exit: EXIT_USAGE,
                    error: ApiError::bad_request("usage", "--orgs must list at least one organisation"),
                });
            }
            for org in &orgs {
                check_org(org)?;
            }
            let rows = benchmark(&orgs, &open_existing(&store)?.snapshot())?;
            match format {
                Format::Json => emit(stdout, &benchmark_json(&rows)),
                Format::Text => emit(stdout, &text::benchmark(&rows)),
            }
        }
        Command::Export(ExportCommand::Cube {
            store,
            org,
            base_iri,
            output,
        }) => {
            check_org(&org)?;
            let cube = open_existing(&store)?.snapshot().cube(&org, &base_iri)?;
            let turtle = serialize_turtle(&cube);
            if output.as_os_str() == "-" {
                emit(stdout, &turtle)
            } else {
                std::fs::write(&output, turtle).map_err(|e| Failure::io(output.display(), e))
            }
        }
        Command::Serve {
            store,
            listen,
            base_iri,
        } => serve(&store, listen, base_iri, stdout),
    }
}

fn serve(args: &StoreArgs, listen: SocketAddr, base_iri: Option<String>, stdout: &mut dyn Write) -> Outcome {
    let _ = tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_env("COMPLIANCE_LOG")
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("off")),
        )
        .try_init();

    let store = Arc::new(open_or_create(args)?);
    let config = ServiceConfig::from_env(base_iri.unwrap_or_else(|| format!("http://{listen}")));
    let app = compliance_service::router(store, config)?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::io("runtime", e))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(listen)
            .await
            .map_err(|e| Failure::io(listen, e))?;
        let local = listener.local_addr().map_err(|e| Failure::io(listen, e))?;
        emit(stdout, &format!("listening on http://{local}\n"))?;
        compliance_service::serve(listener, app)
            .await
            .map_err(|e| Failure::io("server", e))
    })
}
