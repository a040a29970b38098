//! The JSON protocol over WebSockets: `GET /ws` upgrades to a connection that
//! carries one request per text message and answers each with one message.

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::IntoResponse;
use axum::routing::get;
use axum::Router;
use tokio::net::TcpListener;

use crate::protocol::Handler;

pub fn router(max_steps: Option<u64>) -> Router {
    Router::new()
        .route("/", get(|| async { "hollog session server; connect a WebSocket to /ws\n" }))
        .route("/ws", get(upgrade))
        .with_state(max_steps)
}

async fn upgrade(ws: WebSocketUpgrade, State(max_steps): State<Option<u64>>) -> impl IntoResponse {
    ws.on_upgrade(move |socket| session(socket, max_steps))
}

async fn session(mut socket: WebSocket, max_steps: Option<u64>) {
    let mut handler = Handler::new(max_steps);
    while let Some(Ok(msg)) = socket.recv().await {
        let text = match msg {
            Message::Text(t) => t.to_string(),
            Message::Close(_) => break,
            _ => continue,
        };
        let reply = tokio::task::block_in_place(|| handler.handle_line(&text));
        if socket.send(Message::Text(reply.into())).await.is_err() {
            break;
        }
    }
}

/// Serves until the process is stopped.
pub async fn serve(listener: TcpListener, max_steps: Option<u64>) -> std::io::Result<()> {
    axum::serve(listener, router(max_steps)).await
}

