//! Sweep orchestration behind the `lr-horizon` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod grid;
pub mod output;

pub use config::{Cli, Command, Flags, Format, SweepConfig};
pub use error::CliError;
pub use output::Table;

/// Compute the table for `command` without writing anything.
pub fn execute(command: &Command) -> Result<(SweepConfig, Table), CliError> {
    let cfg = SweepConfig::resolve(command.name(), command.flags())?;
    let table = match command {
        Command::Lambda(_) => commands::lambda(&cfg)?,
        Command::Bound(_) => commands::bound(&cfg)?,
        Command::Signaling(_) => commands::signaling(&cfg)?,
        Command::Fit(_) => commands::fit(&cfg)?,
        Command::Protocol(_) => commands::protocol(&cfg)?,
        Command::IsingOracle(_) => commands::ising_oracle(&cfg)?,
    };
    Ok((cfg, table))
}

/// Run `command` and write its outputs.
pub fn run(command: &Command) -> Result<(), CliError> {
    let (cfg, table) = execute(command)?;
    let hash = cfg.hash();
    output::emit(cfg.out.as_deref(), &table.render(cfg.format, &hash))?;
    if let Some(path) = &cfg.plot_data {
        output::emit(Some(path), &table.plot_csv(&hash))?;
    }
    Ok(())
}
