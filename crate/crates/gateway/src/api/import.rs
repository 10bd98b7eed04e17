use std::path::Path;

use axum::extract::{Multipart, State};
use axum::http::{HeaderMap, StatusCode};
use axum::Json;

use mediahub_core::ingest::{
    run_import, DatasetFormat, ImportJob, ImportReport, IngestError, MappingConfig,
};

use super::media::actor_of;
use super::{ApiError, AppState};

fn unprocessable(code: &'static str, e: impl ToString) -> ApiError {
    ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, code, e.to_string())
}

/// Multipart fields: `dataset` (file), `mapping` (JSON), optional `format`
/// (`jsonl` or `csv`; otherwise guessed from the dataset file name).
pub(super) async fn import(
    State(state): State<AppState>,
    headers: HeaderMap,
    mut multipart: Multipart,
) -> Result<Json<ImportReport>, ApiError> {
    let mut dataset: Option<(Option<String>, Vec<u8>)> = None;
    let mut mapping: Option<Vec<u8>> = None;
    let mut format: Option<String> = None;
    while let Some(field) = multipart
        .next_field()
        .await
        .map_err(|e| ApiError::bad_request("bad-multipart", e.body_text()))?
    {
        let name = field.name().unwrap_or_default().to_string();
        let file_name = field.file_name().map(str::to_string);
        let bytes = field
            .bytes()
            .await
            .map_err(|e| ApiError::bad_request("bad-multipart", e.body_text()))?;
        match name.as_str() {
            "dataset" => dataset = Some((file_name, bytes.to_vec())),
            "mapping" => mapping = Some(bytes.to_vec()),
            "format" => format = Some(String::from_utf8_lossy(&bytes).trim().to_string()),
            other => {
                return Err(ApiError::bad_request(
                    "bad-multipart",
                    format!("unexpected field '{other}'"),
                ))
            }
        }
    }
    let (file_name, dataset) = dataset
        .ok_or_else(|| ApiError::bad_request("missing-dataset", "field 'dataset' is required"))?;
    let mapping =
        mapping.ok_or_else(|| unprocessable("invalid-mapping", "field 'mapping' is required"))?;
    let mapping = std::str::from_utf8(&mapping)
        .map_err(|e| unprocessable("invalid-mapping", e))
        .and_then(|m| {
            MappingConfig::from_json(m).map_err(|e| unprocessable("invalid-mapping", e))
        })?;
    let format = match (format.filter(|f| !f.is_empty()), &file_name) {
        (Some(f), _) => f.parse::<DatasetFormat>(),
        (None, Some(name)) => DatasetFormat::from_path(Path::new(name)),
        (None, None) => Ok(DatasetFormat::Jsonl),
    }
    .map_err(|e| unprocessable("unknown-format", e))?;

    let actor = actor_of(&headers);
    let source = file_name.unwrap_or_else(|| "upload".into());
    let hub = state.hub.clone();
    let provider = state.enrichment.clone();
    let report = tokio::task::spawn_blocking(move || {
        let report = {
            let mut lib = hub.write(false)?;
            run_import(
                &mut lib.graph,
                ImportJob {
                    source: &source,
                    dataset: &dataset,
                    format,
                    mapping: &mapping,
                    provider: provider.as_deref(),
                    actor: &actor,
                },
            )
            .map_err(|e| match e {
                IngestError::InvalidMapping(_) => unprocessable("invalid-mapping", e),
                other => unprocessable("import-failed", other),
            })?
        };
        hub.flush()?;
        Ok::<_, ApiError>(report)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    Ok(Json(report))
}
