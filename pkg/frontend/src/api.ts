// Typed client for the study service HTTP API. The client never persists
// anything except the session id handed back by the server; the server is
// the source of truth for progress and accepted responses.

export type StudyInfo = {
  study_id: string
  status: 'draft' | 'collecting' | 'aggregated'
  n: number
  p: number
  set_size: number
  attributes: string[]
  completed_questionnaires: number
}

export type SessionInfo = {
  session_id: string
  labeler_id: string
  questionnaire_index: number
  cursor: number
  total_sets: number
}

export type ProfileCard = {
  id: number
  levels: Record<string, string>
}

export type NextSetPayload = {
  done: false
  set_index: number
  answered: number
  total: number
  profiles: ProfileCard[]
}

export type DonePayload = {
  done: true
  answered: number
  total: number
}

export type SubmitAck = {
  accepted: boolean
  cursor: number
  completed: boolean
}

export type ApiErrorBody = {
  error: { code: string; message: string }
}

export class ApiError extends Error {
  code: string
  status: number

  constructor(status: number, code: string, message: string) {
    super(message)
    this.code = code
    this.status = status
  }
}

async function request<T>(
  base: string,
  method: string,
  path: string,
  body?: unknown,
  token?: string,
): Promise<T> {
  const headers: Record<string, string> = { 'Content-Type': 'application/json' }
  if (token) headers['Authorization'] = `Bearer ${token}`
  const resp = await fetch(base + path, {
    method,
    headers,
    body: body === undefined ? undefined : JSON.stringify(body),
  })
  if (!resp.ok) {
    let code = 'http-error'
    let message = `${resp.status} ${resp.statusText}`
    try {
      const parsed = (await resp.json()) as ApiErrorBody
      if (parsed.error) {
        code = parsed.error.code
        message = parsed.error.message
      }
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(resp.status, code, message)
  }
  return (await resp.json()) as T
}

export class StudyClient {
  constructor(
    readonly base: string,
    readonly token?: string,
  ) {}

  getStudy(studyId: string): Promise<StudyInfo> {
    return request(this.base, 'GET', `/studies/${studyId}`, undefined, this.token)
  }

  createSession(studyId: string, labelerId: string): Promise<SessionInfo> {
    return request(this.base, 'POST', `/studies/${studyId}/sessions`,
      { labeler_id: labelerId }, this.token)
  }

  nextSet(sessionId: string): Promise<NextSetPayload | DonePayload> {
    return request(this.base, 'GET', `/sessions/${sessionId}/next`, undefined, this.token)
  }

  submit(sessionId: string, setIndex: number, mostId: number, leastId: number): Promise<SubmitAck> {
    return request(this.base, 'POST', `/sessions/${sessionId}/responses`,
      { set_index: setIndex, most_id: mostId, least_id: leastId }, this.token)
  }
}
