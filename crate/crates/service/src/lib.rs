//! HTTP/JSON service over the priosel engine: scenario CRUD with optimistic
//! versioning, SRF weight elicitation, and recorded sort, select and
//! robustness runs.

pub mod api;
pub mod problem;
pub mod runs;
pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

pub use api::router;
pub use store::Store;

/// Serves the API on `addr` over the data directory `data`.
pub async fn serve(addr: SocketAddr, data: PathBuf) -> std::io::Result<()> {
    let store = Store::open(&data)
        .await
        .map_err(|e| std::io::Error::other(format!("{:?}", e.problem().detail)))?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(
        "listening on {} with data in {}",
        listener.local_addr()?,
        data.display()
    );
    axum::serve(listener, router(Arc::new(store))).await
}
