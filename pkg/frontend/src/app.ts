// Questionnaire client: renders each choice set as a profile-comparison
// table (attributes as rows, profiles as columns), collects exactly one
// most-risky and one least-risky pick, and submits them in set order.

import {
  ApiError,
  DonePayload,
  NextSetPayload,
  SessionInfo,
  StudyClient,
} from './api.js'
import { Selection, Role, canSubmit, emptySelection, isValidFor, select } from './selection.js'

export type AppOptions = {
  base: string
  studyId: string
  labelerId: string
  token?: string
  root: HTMLElement
  now?: () => number
}

type ViewState =
  | { kind: 'loading' }
  | { kind: 'error'; message: string; retry: 'start' | 'next' | 'submit' }
  | { kind: 'set'; payload: NextSetPayload }
  | { kind: 'done'; payload: DonePayload }

export class LabelerApp {
  readonly client: StudyClient
  session: SessionInfo | null = null
  selection: Selection = emptySelection()
  state: ViewState = { kind: 'loading' }
  submitting = false
  accepted = 0
  private readonly now: () => number
  private startedAt = 0

  constructor(private readonly opts: AppOptions) {
    this.client = new StudyClient(opts.base, opts.token)
    this.now = opts.now ?? (() => Date.now())
  }

  async start(): Promise<void> {
    this.startedAt = this.now()
    this.state = { kind: 'loading' }
    this.render()
    try {
      // re-requesting a session is idempotent server-side
      this.session = await this.client.createSession(this.opts.studyId, this.opts.labelerId)
      await this.loadNext()
    } catch (err) {
      this.fail(err, 'start')
    }
  }

  async loadNext(): Promise<void> {
    if (!this.session) return
    this.state = { kind: 'loading' }
    this.render()
    try {
      const payload = await this.client.nextSet(this.session.session_id)
      this.selection = emptySelection()
      this.state = payload.done
        ? { kind: 'done', payload }
        : { kind: 'set', payload }
      this.render()
    } catch (err) {
      this.fail(err, 'next')
    }
  }

  pick(profileId: number, role: Role): void {
    if (this.state.kind !== 'set' || this.submitting) return
    const members = this.state.payload.profiles.map((p) => p.id)
    if (!members.includes(profileId)) return
    this.selection = select(this.selection, profileId, role)
    this.render()
  }

  async submit(): Promise<void> {
    if (this.state.kind !== 'set' || this.submitting) return
    const payload = this.state.payload
    const members = payload.profiles.map((p) => p.id)
    // the UI cannot reach here with an invalid selection, but never trust
    // render state for a network write
    if (!isValidFor(this.selection, members)) return
    this.submitting = true
    this.render()
    try {
      await this.client.submit(
        this.session!.session_id,
        payload.set_index,
        this.selection.most as number,
        this.selection.least as number,
      )
      this.accepted += 1
      this.submitting = false
      await this.loadNext()
    } catch (err) {
      this.submitting = false
      if (err instanceof ApiError && (err.code === 'conflict' || err.code === 'sequence-error')) {
        // someone (perhaps a duplicated tab) advanced the cursor: re-sync
        await this.loadNext()
        return
      }
      this.fail(err, 'submit')
    }
  }

  private fail(err: unknown, retry: 'start' | 'next' | 'submit'): void {
    const message =
      err instanceof ApiError
        ? userMessage(err)
        : 'Network problem. Your selections are kept; retry when back online.'
    this.state = { kind: 'error', message, retry }
    this.render()
  }

  async retry(): Promise<void> {
    if (this.state.kind !== 'error') return
    const mode = this.state.retry
    if (mode === 'start') await this.start()
    else if (mode === 'submit') {
      // reload the set; the retained selection re-applies if still current
      const kept = this.selection
      await this.loadNext()
      const current = this.state as ViewState
      if (current.kind === 'set') {
        const members = current.payload.profiles.map((p: { id: number }) => p.id)
        if (isValidFor(kept, members)) {
          this.selection = kept
          this.render()
        }
      }
    } else await this.loadNext()
  }

  // ---- rendering -----------------------------------------------------------

  render(): void {
    const root = this.opts.root
    root.innerHTML = ''
    switch (this.state.kind) {
      case 'loading':
        root.appendChild(el('p', { id: 'status' }, 'Loading…'))
        return
      case 'error': {
        root.appendChild(el('p', { id: 'status', class: 'error' }, this.state.message))
        const btn = el('button', { id: 'retry' }, 'Retry') as HTMLButtonElement
        btn.addEventListener('click', () => void this.retry())
        root.appendChild(btn)
        return
      }
      case 'done': {
        const mins = Math.max(0, Math.round((this.now() - this.startedAt) / 60000))
        root.appendChild(el('h2', { id: 'completion' }, 'Questionnaire complete'))
        root.appendChild(
          el(
            'p',
            { id: 'summary' },
            `You answered ${this.state.payload.answered} of ${this.state.payload.total} sets` +
              ` in about ${mins} minute${mins === 1 ? '' : 's'}. Thank you.`,
          ),
        )
        return
      }
      case 'set':
        this.renderSet(root, this.state.payload)
    }
  }

  private renderSet(root: HTMLElement, payload: NextSetPayload): void {
    root.appendChild(
      el(
        'p',
        { id: 'progress' },
        `Set ${payload.answered + 1} of ${payload.total}`,
      ),
    )
    root.appendChild(
      el(
        'p',
        { id: 'instructions' },
        'Mark the profile you judge MOST risky and the one you judge LEAST risky.',
      ),
    )

    const attributes = Object.keys(payload.profiles[0]?.levels ?? {})
    const table = el('table', { id: 'comparison' })
    const head = el('tr', {})
    head.appendChild(el('th', {}, 'Attribute'))
    for (const p of payload.profiles) head.appendChild(el('th', {}, `Profile ${p.id}`))
    table.appendChild(head)
    for (const attr of attributes) {
      const tr = el('tr', {})
      tr.appendChild(el('td', { class: 'attr' }, attr))
      for (const p of payload.profiles) tr.appendChild(el('td', {}, p.levels[attr] ?? ''))
      table.appendChild(tr)
    }

    const controls = el('tr', { class: 'controls' })
    controls.appendChild(el('td', {}, ''))
    for (const p of payload.profiles) {
      const cell = el('td', {})
      cell.appendChild(this.roleButton(p.id, 'most'))
      cell.appendChild(this.roleButton(p.id, 'least'))
      controls.appendChild(cell)
    }
    table.appendChild(controls)
    root.appendChild(table)

    const submit = el('button', { id: 'submit' }, 'Submit and continue') as HTMLButtonElement
    submit.disabled = !canSubmit(this.selection) || this.submitting
    submit.addEventListener('click', () => void this.submit())
    root.appendChild(submit)
  }

  private roleButton(profileId: number, role: Role): HTMLButtonElement {
    const active = this.selection[role] === profileId
    const btn = el(
      'button',
      {
        class: `pick ${role}${active ? ' active' : ''}`,
        'data-id': String(profileId),
        'data-role': role,
      },
      role === 'most' ? 'Most risky' : 'Least risky',
    ) as HTMLButtonElement
    btn.disabled = this.submitting
    btn.addEventListener('click', () => this.pick(profileId, role))
    return btn
  }
}

function userMessage(err: ApiError): string {
  switch (err.code) {
    case 'auth':
      return 'Your session token was rejected. Re-open the study link to sign in again.'
    case 'capacity':
      return 'All questionnaires in this study are already assigned.'
    case 'not-ready':
      return 'This study is not collecting responses right now.'
    case 'invalid-response':
      return 'The server rejected that selection. Reload and try again.'
    default:
      return `The server reported a problem (${err.code}).`
  }
}

function el(tag: string, attrs: Record<string, string>, text?: string): HTMLElement {
  const node = document.createElement(tag)
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v)
  if (text !== undefined) node.textContent = text
  return node
}

// Browser entry: /index.html?study=ID&labeler=NAME[&base=URL][&token=T]
export function mountFromLocation(root: HTMLElement): LabelerApp | null {
  const params = new URLSearchParams(window.location.search)
  const studyId = params.get('study')
  const labelerId = params.get('labeler')
  if (!studyId || !labelerId) {
    root.textContent = 'Missing ?study= and ?labeler= query parameters.'
    return null
  }
  const app = new LabelerApp({
    base: params.get('base') ?? '',
    studyId,
    labelerId,
    token: params.get('token') ?? undefined,
    root,
  })
  void app.start()
  return app
}
