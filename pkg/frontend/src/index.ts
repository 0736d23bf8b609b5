/**
 * Bindings for the polich constrained-decoding engine.
 *
 * The engine runs as a `polich session` subprocess speaking a JSON-lines
 * request/response protocol over stdio; this module hides the transport and
 * exposes sessions plus the validity/equivalence helpers. Tokens cross the
 * boundary as strings ("Q0", "and", "not", "(", ")"), never integer ids.
 *
 * Surface: open_session, step, finish, close_session, is_valid, equivalent,
 * version. Sessions must not be shared across concurrent decode loops.
 */

import { spawn, type ChildProcessByStdio } from "node:child_process";
import { createInterface, type Interface } from "node:readline";
import type { Readable, Writable } from "node:stream";

export class BindingsError extends Error {}
export class BadConfigError extends BindingsError {}
export class IllegalTokenError extends BindingsError {}
export class IncompleteError extends BindingsError {}
export class SessionClosedError extends BindingsError {}
export class ParseError extends BindingsError {}

export interface ConfigFlags {
  allow_double_negation?: boolean;
  max_open_budget_rule?: boolean;
  max_nesting_depth?: number;
  strict_replay?: boolean;
}

interface Response {
  ok: boolean;
  error?: string;
  session?: number;
  mask?: string[];
  tokens?: string[];
  valid?: boolean;
  equivalent?: boolean;
  version?: string;
}

function toError(message: string): BindingsError {
  const [kind] = message.split(":", 1);
  switch (kind) {
    case "BadConfigError":
      return new BadConfigError(message);
    case "IllegalTokenError":
      return new IllegalTokenError(message);
    case "IncompleteError":
      return new IncompleteError(message);
    case "SessionClosedError":
      return new SessionClosedError(message);
    case "ParseError":
    case "ExprSyntaxError":
    case "UnknownTokenError":
    case "DuplicateQuestionError":
      return new ParseError(message);
    default:
      return new BindingsError(message);
  }
}

/** One engine subprocess; requests are answered strictly in order. */
class Engine {
  private child: ChildProcessByStdio<Writable, Readable, null>;
  private lines: Interface;
  private pending: Array<{
    resolve: (r: Response) => void;
    reject: (e: Error) => void;
  }> = [];

  constructor(command: string[]) {
    this.child = spawn(command[0], command.slice(1), {
      stdio: ["pipe", "pipe", "inherit"],
    });
    this.lines = createInterface({ input: this.child.stdout });
    this.lines.on("line", (line) => {
      const waiter = this.pending.shift();
      if (this.pending.length === 0) this.setKeepAlive(false);
      if (waiter) waiter.resolve(JSON.parse(line) as Response);
    });
    this.child.on("exit", () => {
      for (const waiter of this.pending.splice(0)) {
        waiter.reject(new BindingsError("engine process exited"));
      }
    });
    this.setKeepAlive(false);
  }

  /** Keep the event loop alive only while a request is in flight; an idle
   * engine never blocks process exit (it stops on stdin EOF). */
  private setKeepAlive(alive: boolean): void {
    const streams = [this.child.stdin, this.child.stdout] as unknown as Array<{
      ref?: () => void;
      unref?: () => void;
    }>;
    if (alive) {
      this.child.ref();
      for (const stream of streams) stream.ref?.();
    } else {
      this.child.unref();
      for (const stream of streams) stream.unref?.();
    }
  }

  request(payload: Record<string, unknown>): Promise<Response> {
    return new Promise((resolve, reject) => {
      this.pending.push({ resolve, reject });
      this.setKeepAlive(true);
      this.child.stdin.write(JSON.stringify(payload) + "\n");
    });
  }

  async call(payload: Record<string, unknown>): Promise<Response> {
    const response = await this.request(payload);
    if (!response.ok) throw toError(response.error ?? "unknown engine error");
    return response;
  }

  stop(): void {
    this.child.stdin.write(JSON.stringify({ op: "exit" }) + "\n");
    this.child.stdin.end();
  }
}

let engineCommand = ["python3", "-m", "polich", "session"];
let shared: Engine | null = null;

/** Override the engine launch command (e.g. a venv interpreter). Takes
 * effect for engines started afterwards. */
export function configure_engine(command: string[]): void {
  engineCommand = command;
  if (shared) {
    shared.stop();
    shared = null;
  }
}

function engine(): Engine {
  if (!shared) shared = new Engine(engineCommand);
  return shared;
}

/** Stop the shared engine subprocess (it restarts on the next call). */
export function shutdown(): void {
  if (shared) {
    shared.stop();
    shared = null;
  }
}

export class Session {
  /** Mask after the latest step; empty once every question is used. */
  mask: string[];
  private handle: number;
  private owner: Engine;

  constructor(owner: Engine, handle: number, mask: string[]) {
    this.owner = owner;
    this.handle = handle;
    this.mask = mask;
  }

  async step(token: string): Promise<string[]> {
    const response = await this.owner.call({
      op: "step",
      session: this.handle,
      token,
    });
    this.mask = response.mask ?? [];
    return this.mask;
  }

  async finish(): Promise<string[]> {
    const response = await this.owner.call({
      op: "finish",
      session: this.handle,
    });
    return response.tokens ?? [];
  }

  async close(): Promise<void> {
    await this.owner.call({ op: "close", session: this.handle });
  }
}

export async function open_session(
  question_count: number,
  config_flags: ConfigFlags = {},
): Promise<Session> {
  const response = await engine().call({
    op: "open",
    question_count,
    config: config_flags,
  });
  return new Session(engine(), response.session!, response.mask ?? []);
}

export function step(session: Session, token: string): Promise<string[]> {
  return session.step(token);
}

export function finish(session: Session): Promise<string[]> {
  return session.finish();
}

export function close_session(session: Session): Promise<void> {
  return session.close();
}

export async function is_valid(expression: string): Promise<boolean> {
  const response = await engine().call({ op: "is_valid", expr: expression });
  return response.valid!;
}

export async function equivalent(a: string, b: string): Promise<boolean> {
  const response = await engine().call({ op: "equivalent", a, b });
  return response.equivalent!;
}

export async function version(): Promise<string> {
  const response = await engine().call({ op: "version" });
  return response.version!;
}
