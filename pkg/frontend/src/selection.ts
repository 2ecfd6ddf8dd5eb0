// Selection rules for one choice set: exactly one "most risky" and one
// "least risky" pick, never the same profile. Kept free of DOM and network
// concerns so the invariants are directly testable.

export type Role = 'most' | 'least'

export type Selection = {
  most: number | null
  least: number | null
}

export function emptySelection(): Selection {
  return { most: null, least: null }
}

// Assigning a role already held by another profile moves the role; assigning
// a role to the profile currently holding the opposite role clears the
// opposite one, so most === least can never be produced.
export function select(sel: Selection, profileId: number, role: Role): Selection {
  const next = { ...sel }
  if (role === 'most') {
    next.most = profileId
    if (next.least === profileId) next.least = null
  } else {
    next.least = profileId
    if (next.most === profileId) next.most = null
  }
  return next
}

export function canSubmit(sel: Selection): boolean {
  return sel.most !== null && sel.least !== null && sel.most !== sel.least
}

export function isValidFor(sel: Selection, memberIds: number[]): boolean {
  return (
    canSubmit(sel) &&
    memberIds.includes(sel.most as number) &&
    memberIds.includes(sel.least as number)
  )
}
