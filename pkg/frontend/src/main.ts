import { mountFromLocation } from './app.js'

const root = document.getElementById('app')
if (root) mountFromLocation(root)
