use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use priosel_core::domain::WeightVector;
use priosel_core::robustness::{BudgetCase, PipelineError};
use priosel_core::srf::{compute_srf_weights, round_weights, validate_deck, DeckSpec};

use crate::problem::ApiError;
use crate::runs::{execute, RunInput, RunPayload, RunRecord};
use crate::store::{scenario_from_value, ScenarioEnvelope, ScenarioSummary, Store};

pub type AppState = Arc<Store>;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/scenarios", get(list_scenarios).post(create_scenario))
        .route("/api/scenarios/{id}", get(get_scenario).put(put_scenario))
        .route("/api/scenarios/{id}/weights/srf", put(put_srf))
        .route("/api/scenarios/{id}/sort", post(post_sort))
        .route("/api/scenarios/{id}/select", post(post_select))
        .route("/api/scenarios/{id}/robustness", post(post_robustness))
        .route("/api/runs/{id}", get(get_run))
        .with_state(state)
}

fn body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(bytes)
        .map_err(|e| ApiError::invalid(format!("request body, line {} column {}: {e}", e.line(), e.column())))
}

async fn list_scenarios(State(store): State<AppState>) -> Result<Json<Vec<ScenarioSummary>>, ApiError> {
    Ok(Json(store.list().await?))
}

async fn create_scenario(
    State(store): State<AppState>,
    bytes: Bytes,
) -> Result<(StatusCode, Json<ScenarioEnvelope>), ApiError> {
    let doc: serde_json::Value = body(&bytes)?;
    let scenario = scenario_from_value(&doc)?;
    let stored = store.create(scenario).await?;
    Ok((StatusCode::CREATED, Json(stored.envelope())))
}

async fn get_scenario(
    State(store): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<ScenarioEnvelope>, ApiError> {
    Ok(Json(store.get(&id).await?.envelope()))
}

#[derive(Deserialize)]
struct PutScenario {
    version: u64,
    scenario: serde_json::Value,
}

async fn put_scenario(
    State(store): State<AppState>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> Result<Json<ScenarioEnvelope>, ApiError> {
    let req: PutScenario = body(&bytes)?;
    let replacement = scenario_from_value(&req.scenario)?;
    let stored = store
        .update(&id, Some(req.version), move |s| {
            *s = replacement;
            Ok(())
        })
        .await?;
    Ok(Json(stored.envelope()))
}

#[derive(Deserialize)]
struct SrfRequest {
    deck: DeckSpec,
    #[serde(default)]
    version: Option<u64>,
}

#[derive(Serialize)]
struct SrfResponse {
    scenario: String,
    version: u64,
    name: String,
    weights: BTreeMap<String, f64>,
    rounded: BTreeMap<String, f64>,
}

/// Computes weights from a card deck and stores deck and weights under the
/// deck's name.
async fn put_srf(
    State(store): State<AppState>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> Result<Json<SrfResponse>, ApiError> {
    let req: SrfRequest = body(&bytes)?;
    let deck = req
        .deck
        .canonical()
        .map_err(|e| ApiError::field("deck.levels", e.to_string()))?;
    let current = store.get(&id).await?;
    let ids: Vec<String> = current.scenario.criteria.iter().map(|c| c.id.clone()).collect();
    let issues = validate_deck(&deck, Some(&ids));
    if !issues.is_empty() {
        return Err(ApiError::Invalid {
            detail: "card deck is invalid".into(),
            errors: issues
                .into_iter()
                .map(|message| crate::problem::FieldError {
                    path: "deck".into(),
                    message,
                })
                .collect(),
        });
    }
    let weights = compute_srf_weights(&deck).map_err(|e| ApiError::field("deck", e.to_string()))?;
    let name = req.deck.name.clone();
    let (w, spec) = (weights.clone(), req.deck);
    let stored = store
        .update(&id, req.version, move |s| {
            let vector = WeightVector::new(spec.name.clone(), w);
            match s.weight_vectors.iter_mut().find(|v| v.name == spec.name) {
                Some(v) => *v = vector,
                None => s.weight_vectors.push(vector),
            }
            match s.decks.iter_mut().find(|d| d.name == spec.name) {
                Some(d) => *d = spec,
                None => s.decks.push(spec),
            }
            Ok(())
        })
        .await?;
    Ok(Json(SrfResponse {
        scenario: stored.id,
        version: stored.version,
        name,
        rounded: round_weights(&weights, 1),
        weights,
    }))
}

fn pipeline(e: PipelineError) -> ApiError {
    ApiError::invalid(e.to_string())
}

async fn record(store: &Store, scenario_id: &str, input: RunInput) -> Result<RunRecord, ApiError> {
    let result = tokio::task::spawn_blocking({
        let input = input.clone();
        move || execute(&input)
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))?
    .map_err(pipeline)?;
    let rec = RunRecord {
        id: uuid::Uuid::new_v4().simple().to_string(),
        scenario_id: scenario_id.into(),
        kind: input.kind(),
        snapshot_hash: input.snapshot_hash(),
        parameters: input.parameters(),
        created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        input,
        result,
    };
    store.put_run(&rec).await?;
    tracing::info!(run = %rec.id, kind = ?rec.kind, "run recorded");
    Ok(rec)
}

#[derive(Deserialize)]
struct SortRequest {
    weights: String,
    #[serde(default)]
    lambda: Option<f64>,
}

async fn post_sort(
    State(store): State<AppState>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> Result<(StatusCode, Json<RunRecord>), ApiError> {
    let req: SortRequest = body(&bytes)?;
    let s = store.get(&id).await?.scenario;
    if s.weight_vector(&req.weights).is_none() {
        return Err(ApiError::field(
            "weights",
            format!("unknown weight vector {:?}", req.weights),
        ));
    }
    let lambda = req.lambda.unwrap_or(s.lambda);
    let input = RunInput::Sort {
        scenario: s,
        weights: req.weights,
        lambda,
    };
    Ok((StatusCode::CREATED, Json(record(&store, &id, input).await?)))
}

/// A budget given as an amount or as the name of a scenario budget.
#[derive(Deserialize)]
#[serde(untagged)]
enum BudgetRef {
    Amount(f64),
    Name(String),
}

#[derive(Deserialize)]
struct SelectRequest {
    budget: BudgetRef,
    profile: String,
    assignments_run: String,
}

async fn post_select(
    State(store): State<AppState>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> Result<(StatusCode, Json<RunRecord>), ApiError> {
    let req: SelectRequest = body(&bytes)?;
    let s = store.get(&id).await?.scenario;
    let budget_text = match &req.budget {
        BudgetRef::Amount(a) => a.to_string(),
        BudgetRef::Name(n) => n.clone(),
    };
    let budget =
        BudgetCase::parse(&s, &format!("{budget_text}:{}", req.profile), &req.profile).map_err(|e| match e {
            PipelineError::UnknownProfile(_) => ApiError::field("profile", e.to_string()),
            _ => ApiError::field("budget", e.to_string()),
        })?;
    let sort = store.get_run(&req.assignments_run).await?;
    let RunPayload::Sort(run) = &sort.result else {
        return Err(ApiError::field("assignments_run", "run is not a sorting run"));
    };
    if sort.scenario_id != id {
        return Err(ApiError::field(
            "assignments_run",
            format!("run belongs to scenario {:?}", sort.scenario_id),
        ));
    }
    let input = RunInput::Select {
        scenario: s,
        assignments_run: sort.id.clone(),
        assignments: run.assignments.clone(),
        budget,
    };
    let rec = record(&store, &id, input).await?;
    if let Some(report) = rec.infeasibility() {
        return Err(ApiError::Infeasible {
            run: rec.id.clone(),
            report: report.clone(),
        });
    }
    Ok((StatusCode::CREATED, Json(rec)))
}

#[derive(Deserialize)]
struct RobustnessRequest {
    #[serde(default)]
    weight_sets: Option<Vec<String>>,
    budgets: Vec<String>,
    #[serde(default)]
    profile: Option<String>,
    #[serde(default)]
    lambda: Option<f64>,
}

async fn post_robustness(
    State(store): State<AppState>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> Result<(StatusCode, Json<RunRecord>), ApiError> {
    let req: RobustnessRequest = body(&bytes)?;
    let s = store.get(&id).await?.scenario;
    let profile = req.profile.unwrap_or_else(|| "full".into());
    let budgets = req
        .budgets
        .iter()
        .enumerate()
        .map(|(i, b)| {
            BudgetCase::parse(&s, b, &profile).map_err(|e| ApiError::field(format!("budgets.{i}"), e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let weight_sets = req
        .weight_sets
        .unwrap_or_else(|| s.weight_vectors.iter().map(|w| w.name.clone()).collect());
    if let Some((i, w)) = weight_sets
        .iter()
        .enumerate()
        .find(|(_, w)| s.weight_vector(w).is_none())
    {
        return Err(ApiError::field(
            format!("weight_sets.{i}"),
            format!("unknown weight vector {w:?}"),
        ));
    }
    let lambda = req.lambda.unwrap_or(s.lambda);
    let input = RunInput::Robustness {
        scenario: s,
        weight_sets,
        budgets,
        lambda,
    };
    Ok((StatusCode::CREATED, Json(record(&store, &id, input).await?)))
}

async fn get_run(State(store): State<AppState>, Path(id): Path<String>) -> Result<Json<RunRecord>, ApiError> {
    Ok(Json(store.get_run(&id).await?))
}
