//! `serve`: the matching API over a file-backed store.

use std::path::Path;
use std::sync::Arc;

use collabrec_matchsvc::http::router;
use collabrec_matchsvc::{FileStore, MatchService, ServiceConfig, ServiceError, SystemClock};

use crate::config::Config;
use crate::manifest::Manifest;
use crate::{setup, CliError};

fn service_error(e: ServiceError) -> CliError {
    CliError::Runtime(e.to_string())
}

pub fn serve(config: &Config, manifest_to: Option<&Path>) -> Result<(), CliError> {
    let store = FileStore::open(&config.serve.store).map_err(|e| CliError::Runtime(e.to_string()))?;
    let service_config = ServiceConfig {
        embedding_dimension: config.embeddings.dimension,
        embedding_seed: config.seed,
        alpha: config.vectorize.alpha,
        ..ServiceConfig::default()
    };
    let service =
        MatchService::open(Arc::new(store), Arc::new(SystemClock::new()), service_config).map_err(service_error)?;

    if config.serve.import_corpus {
        let mut imported = 0usize;
        for profile in setup::load_corpus(config)? {
            if service.profile(&profile.id).map_err(service_error)?.is_some() {
                continue;
            }
            match service.import_profile(profile) {
                Ok(()) => imported += 1,
                Err(e @ (ServiceError::DuplicateEmail(_) | ServiceError::InvalidProfile(_))) => {
                    tracing::warn!(error = %e, "profile skipped");
                }
                Err(e) => return Err(service_error(e)),
            }
        }
        tracing::info!(imported, "corpus imported");
    }
    let manifest_path = manifest_to.map_or_else(|| config.serve.store.join("manifest.json"), Path::to_path_buf);
    Manifest::new("serve", config, None).write(&manifest_path)?;

    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Runtime(format!("starting runtime: {e}")))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&config.serve.addr)
            .await
            .map_err(|e| CliError::Runtime(format!("binding {}: {e}", config.serve.addr)))?;
        let local = listener.local_addr().map_err(|e| CliError::Runtime(e.to_string()))?;
        tracing::info!(addr = %local, store = %config.serve.store.display(), "listening");
        println!("listening on http://{local}");
        axum::serve(listener, router(Arc::new(service)))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| CliError::Runtime(format!("server: {e}")))
    })
}
