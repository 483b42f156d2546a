//! HTTP advisor: sessions that propose experiments, take results back and
//! keep the PKG current.

mod http;
mod session;
mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

pub use http::{router, ErrorBody, OutcomesRequest, WhatIfRequest};
pub use session::{
    CreateRequest, ErrorCode, Mode, PairBreakdown, ProposalView, ServiceError, Session, SessionView, SubmitResult,
    WhatIf,
};
pub use store::{Event, Snapshot, Store};

/// Serves until the process is stopped. Sessions persist under `data_dir`
/// when given, otherwise they live in memory only.
pub async fn serve(addr: SocketAddr, data_dir: Option<PathBuf>) -> anyhow::Result<()> {
    let store = match data_dir {
        Some(dir) => Store::open(dir)?,
        None => Store::in_memory(),
    };
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(store))).await?;
    Ok(())
}
