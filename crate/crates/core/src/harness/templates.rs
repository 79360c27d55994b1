//! Query templates for the synthetic help/not-help corpus.
//!
//! Surface verbs deliberately include synonyms missing from the action
//! lexicon ("hook up", "sync", "link", ...) so that lexicon coverage gaps
//! show up in generated data the way they do in real traffic.

/// One supported task: a canonical action and the ways people phrase it.
#[derive(Debug, Clone, Copy)]
pub struct Task {
    pub action: &'static str,
    pub verbs: &'static [&'static str],
    /// Complements appended to commands and some help queries.
    pub tails: &'static [&'static str],
}

#[derive(Debug, Clone, Copy)]
pub struct SkillTemplate {
    pub skill: &'static str,
    pub nouns: &'static [&'static str],
    pub tasks: &'static [Task],
    /// Relative frequency in the generated corpus.
    pub weight: f64,
}

impl SkillTemplate {
    pub fn response_id(&self, task: &Task) -> String {
        format!("{}_{}", task.action, self.skill)
    }

    pub fn about_response_id(&self) -> String {
        format!("about_{}", self.skill)
    }
}

const NONE: &[&str] = &[""];

pub const SKILLS: &[SkillTemplate] = &[
    SkillTemplate {
        skill: "alarm",
        nouns: &["an alarm", "the alarm", "my alarm", "a wake up alarm", "alarms"],
        weight: 16.0,
        tasks: &[
            Task { action: "create", verbs: &["set", "set up", "create", "make", "add", "put"], tails: &["", " for {time}", " at {time}", " for tomorrow morning", " every weekday"] },
            Task { action: "delete", verbs: &["delete", "cancel", "remove", "turn off", "get rid of", "disable"], tails: &["", " for {time}", " at {time}", " for tomorrow"] },
            Task { action: "snooze", verbs: &["snooze", "postpone", "delay"], tails: &["", " for ten minutes", " for 5 minutes"] },
            Task { action: "update", verbs: &["change", "edit", "move", "reset", "modify"], tails: &["", " to {time}", " from {time} to {time}"] },
            Task { action: "check", verbs: &["check", "see", "view", "list"], tails: &["", " for tomorrow", " i have"] },
        ],
    },
    SkillTemplate {
        skill: "music",
        nouns: &["music", "a song", "songs", "my playlist", "an album", "some {genre}", "{genre} music"],
        weight: 14.0,
        tasks: &[
            Task { action: "play", verbs: &["play", "listen to", "put on", "stream", "start"], tails: &["", " by {artist}", " from {artist}", " on spotify"] },
            Task { action: "pause", verbs: &["pause", "hold", "freeze"], tails: NONE },
            Task { action: "skip", verbs: &["skip", "go to the next", "jump past"], tails: NONE },
            Task { action: "stop", verbs: &["stop", "end", "shut off"], tails: NONE },
        ],
    },
    SkillTemplate {
        skill: "reminder",
        nouns: &["a reminder", "reminders", "my reminder", "the reminder"],
        weight: 10.0,
        tasks: &[
            Task { action: "create", verbs: &["create", "set", "add", "make", "set up"], tails: &["", " for {time}", " to {chore}", " to {chore} at {time}", " for tomorrow"] },
            Task { action: "delete", verbs: &["delete", "cancel", "remove", "clear", "dismiss"], tails: &["", " for {time}", " about {chore}"] },
            Task { action: "update", verbs: &["change", "edit", "reschedule", "move", "push back"], tails: &["", " to {time}", " about {chore}"] },
            Task { action: "check", verbs: &["check", "see", "view", "review"], tails: &["", " for today", " for this week"] },
        ],
    },
    SkillTemplate {
        skill: "weather",
        nouns: &["the weather", "the forecast", "the temperature", "weather updates", "the weather forecast"],
        weight: 9.0,
        tasks: &[
            Task { action: "check", verbs: &["check", "get", "see", "find out", "hear"], tails: &["", " in {city}", " for tomorrow", " for the weekend", " in {city} today"] },
        ],
    },
    SkillTemplate {
        skill: "timer",
        nouns: &["a timer", "the timer", "my timer", "a countdown"],
        weight: 7.0,
        tasks: &[
            Task { action: "create", verbs: &["set", "start", "create", "set up", "run"], tails: &["", " for {minutes} minutes", " for an hour"] },
            Task { action: "delete", verbs: &["cancel", "delete", "remove", "kill"], tails: NONE },
            Task { action: "pause", verbs: &["pause", "hold", "freeze"], tails: NONE },
            Task { action: "check", verbs: &["check", "see", "view"], tails: &["", " remaining"] },
        ],
    },
    SkillTemplate {
        skill: "calendar",
        nouns: &["a meeting", "an appointment", "an event", "my calendar", "a calendar event"],
        weight: 6.0,
        tasks: &[
            Task { action: "create", verbs: &["add", "schedule", "create", "book", "set up"], tails: &["", " for {time}", " with {person}", " tomorrow at {time}"] },
            Task { action: "delete", verbs: &["cancel", "delete", "remove", "drop"], tails: &["", " at {time}", " with {person}"] },
            Task { action: "update", verbs: &["reschedule", "move", "change", "shift"], tails: &["", " to {time}", " with {person}"] },
            Task { action: "check", verbs: &["check", "see", "view", "look at"], tails: &["", " for today", " for next week"] },
        ],
    },
    SkillTemplate {
        skill: "news",
        nouns: &["the news", "the headlines", "news updates", "the latest news", "a news briefing"],
        weight: 5.0,
        tasks: &[
            Task { action: "read", verbs: &["read", "hear", "get", "catch up on"], tails: &["", " about {topic}", " for today"] },
            Task { action: "play", verbs: &["play", "listen to", "stream"], tails: &["", " from {source}"] },
        ],
    },
    SkillTemplate {
        skill: "bluetooth",
        nouns: &["bluetooth", "my headphones", "bluetooth headphones", "my earbuds", "a bluetooth speaker"],
        weight: 4.5,
        tasks: &[
            Task { action: "connect", verbs: &["connect", "pair", "hook up", "link", "connect to"], tails: &["", " to my phone", " via bluetooth"] },
            Task { action: "disconnect", verbs: &["disconnect", "unpair", "unlink", "forget"], tails: &["", " from my phone"] },
        ],
    },
    SkillTemplate {
        skill: "email",
        nouns: &["an email", "my email", "emails", "a mail", "my inbox"],
        weight: 4.0,
        tasks: &[
            Task { action: "send", verbs: &["send", "write", "compose", "draft", "shoot off"], tails: &["", " to {person}"] },
            Task { action: "read", verbs: &["read", "check", "open", "go through"], tails: &["", " from {person}"] },
            Task { action: "delete", verbs: &["delete", "remove", "trash", "erase"], tails: &["", " from {person}"] },
        ],
    },
    SkillTemplate {
        skill: "phone",
        nouns: &["a phone call", "my contacts", "a contact", "the phone"],
        weight: 3.5,
        tasks: &[Task { action: "call", verbs: &["call", "dial", "ring", "phone", "make"], tails: &["", " {person}"] }],
    },
    SkillTemplate {
        skill: "message",
        nouns: &["a text message", "a message", "messages", "an sms", "a text"],
        weight: 3.5,
        tasks: &[
            Task { action: "send", verbs: &["send", "write", "compose", "text"], tails: &["", " to {person}"] },
            Task { action: "read", verbs: &["read", "open", "see", "view"], tails: &["", " from {person}"] },
        ],
    },
    SkillTemplate {
        skill: "radio",
        nouns: &["the radio", "a radio station", "an fm station", "{genre} radio"],
        weight: 3.0,
        tasks: &[
            Task { action: "play", verbs: &["play", "listen to", "tune in to", "put on"], tails: NONE },
            Task { action: "stop", verbs: &["stop", "turn off", "shut off"], tails: NONE },
        ],
    },
    SkillTemplate {
        skill: "tv",
        nouns: &["my tv", "the smart tv", "my television", "the tv"],
        weight: 2.5,
        tasks: &[
            Task { action: "connect", verbs: &["connect", "sync", "pair", "cast to", "link"], tails: &["", " to my phone"] },
            Task { action: "turn_on", verbs: &["turn on", "switch on", "power on", "start"], tails: NONE },
            Task { action: "turn_off", verbs: &["turn off", "switch off", "power off", "shut down"], tails: NONE },
        ],
    },
    SkillTemplate {
        skill: "flight",
        nouns: &["a flight", "my flight", "flights", "a plane"],
        weight: 2.5,
        tasks: &[
            Task { action: "track", verbs: &["track", "follow", "monitor"], tails: &["", " to {city}"] },
            Task { action: "book", verbs: &["book", "reserve", "get tickets for"], tails: &["", " to {city}"] },
            Task { action: "check", verbs: &["check", "see", "get the status of"], tails: &["", " to {city}"] },
        ],
    },
    SkillTemplate {
        skill: "traffic",
        nouns: &["traffic", "my commute", "the traffic", "road conditions"],
        weight: 2.0,
        tasks: &[Task { action: "check", verbs: &["check", "see", "get", "hear about"], tails: &["", " to work", " to {city}"] }],
    },
    SkillTemplate {
        skill: "sports",
        nouns: &["sports scores", "the score", "my team", "the game"],
        weight: 2.0,
        tasks: &[
            Task { action: "check", verbs: &["check", "get", "see"], tails: &["", " for {team}"] },
            Task { action: "track", verbs: &["track", "follow", "keep up with"], tails: &["", " {team}"] },
        ],
    },
    SkillTemplate {
        skill: "stock",
        nouns: &["a stock", "stock prices", "the stock market", "my stocks"],
        weight: 1.5,
        tasks: &[
            Task { action: "check", verbs: &["check", "get", "see"], tails: &["", " for {company}"] },
            Task { action: "track", verbs: &["track", "follow", "watch"], tails: &["", " for {company}"] },
        ],
    },
    SkillTemplate {
        skill: "shopping",
        nouns: &["my shopping list", "a grocery list", "groceries", "the shopping list"],
        weight: 1.5,
        tasks: &[
            Task { action: "create", verbs: &["create", "make", "start", "add to"], tails: &["", " for {item}"] },
            Task { action: "buy", verbs: &["buy", "order", "purchase", "reorder"], tails: &["", " {item}"] },
            Task { action: "check", verbs: &["check", "see", "view"], tails: NONE },
        ],
    },
    SkillTemplate {
        skill: "recipe",
        nouns: &["a recipe", "recipes", "a dinner recipe", "cooking ideas"],
        weight: 1.5,
        tasks: &[Task { action: "find", verbs: &["find", "search for", "look up", "get"], tails: &["", " for {dish}"] }],
    },
    SkillTemplate {
        skill: "translation",
        nouns: &["a translation", "a phrase in another language", "a word into {language}"],
        weight: 1.0,
        tasks: &[Task { action: "translate", verbs: &["translate", "get", "say"], tails: &["", " in {language}"] }],
    },
    SkillTemplate {
        skill: "calculator",
        nouns: &["the calculator", "a math problem", "some math"],
        weight: 1.0,
        tasks: &[Task { action: "calculate", verbs: &["calculate", "compute", "do", "solve"], tails: NONE }],
    },
    SkillTemplate {
        skill: "lights",
        nouns: &["the lights", "my lamp", "the bedroom lights", "smart bulbs"],
        weight: 1.0,
        tasks: &[
            Task { action: "turn_on", verbs: &["turn on", "switch on", "light up"], tails: NONE },
            Task { action: "turn_off", verbs: &["turn off", "switch off", "kill"], tails: NONE },
            Task { action: "dim", verbs: &["dim", "brighten", "lower"], tails: NONE },
        ],
    },
    SkillTemplate {
        skill: "navigation",
        nouns: &["directions", "a route", "the map", "navigation"],
        weight: 1.0,
        tasks: &[
            Task { action: "navigate", verbs: &["navigate", "drive", "get"], tails: &["", " to {city}"] },
            Task { action: "find", verbs: &["find", "search for", "look up"], tails: &["", " to {city}"] },
        ],
    },
    SkillTemplate {
        skill: "fact",
        nouns: &["a question", "trivia", "a fact", "facts"],
        weight: 1.0,
        tasks: &[
            Task { action: "ask", verbs: &["ask", "pose", "get an answer to"], tails: NONE },
            Task { action: "find", verbs: &["find", "look up", "search for"], tails: &["", " about {topic}"] },
        ],
    },
];

/// Skills used at desk scale, in order of frequency.
pub const DESK_SKILLS: &[&str] = &["alarm", "music", "reminder", "weather", "timer", "calendar", "news", "bluetooth"];

/// Task help phrasings; `{verb}` and `{noun}` come from a skill task.
pub const TASK_HELP: &[&str] = &[
    "how do i {verb} {noun}{tail}",
    "how to {verb} {noun}{tail}",
    "how can i {verb} {noun}",
    "help me {verb} {noun}{tail}",
    "help me to {verb} {noun}",
    "can you help me {verb} {noun}",
    "tell me how to {verb} {noun}",
    "tell me the steps to {verb} {noun}",
    "what are the steps to {verb} {noun}",
    "i would like to know how to {verb} {noun}",
    "i want to learn how to {verb} {noun}",
    "is it possible to {verb} {noun}",
    "show me how to {verb} {noun}",
    "i need help to {verb} {noun}",
    "what should i say to {verb} {noun}",
    "what is the command to {verb} {noun}",
    "explain how to {verb} {noun}",
    "how does one {verb} {noun}",
    "wanna know how to {verb} {noun}",
    "hw do i {verb} {noun}{tail}",
    "how do ya {verb} {noun}",
    "gimme instructions to {verb} {noun}",
    "can you {verb} {noun}",
    "i would like to {verb} {noun}",
];

/// Questions about whether a skill exists or what it does.
pub const SKILL_INFO: &[&str] = &[
    "do you have {noun}",
    "do you support {noun}",
    "tell me about {noun}",
    "what can you do with {noun}",
    "can you handle {noun}",
    "are you able to manage {noun}",
    "what options do you have for {noun}",
    "do you know anything about {noun}",
];

pub const GENERIC_HELP: &[&str] = &[
    "what can you do",
    "what are your skills",
    "what can i ask you",
    "help",
    "i need help",
    "what are you capable of",
    "show me what you can do",
    "what do you know how to do",
    "list your features",
    "what commands do you understand",
    "how can you help me",
    "what are your features",
    "what else can you do",
    "what things can you help with",
    "what kind of stuff can you do",
    "help me out here",
    "how do i use you",
    "what are you able to do",
    "what can you help me with",
    "what is possible with you",
    "can you help me",
    "give me a list of things you can do",
    "how do i get started",
    "tell me your capabilities",
];

/// Imperative commands; the assistant should just do these.
pub const COMMANDS: &[&str] = &[
    "{verb} {noun}{tail}",
    "please {verb} {noun}{tail}",
    "{verb} {noun}{tail} please",
    "ok {verb} {noun}{tail}",
    "hey {verb} {noun}{tail}",
    "{verb} {noun}{tail} now",
    "go ahead and {verb} {noun}{tail}",
    "quickly {verb} {noun}{tail}",
];

/// Chit-chat and factual questions with no task behind them.
pub const OTHER: &[&str] = &[
    "how are you",
    "how are you doing today",
    "tell me a joke",
    "good morning",
    "good night",
    "thank you",
    "thanks a lot",
    "who made you",
    "what is your name",
    "i love you",
    "you are funny",
    "sing me a song",
    "what is the capital of {country}",
    "who is the president of {country}",
    "how tall is {landmark}",
    "how far is {landmark} from here",
    "how old is {person}",
    "who is {person}",
    "what time is it",
    "what is today's date",
    "when is {holiday}",
    "what is {number} plus {number}",
    "how many people live in {city}",
    "what is the population of {country}",
    "where is {landmark}",
    "who won the game last night",
    "what does {word} mean",
    "spell {word}",
    "is it going to rain in {city}",
    "what's the weather in {city}",
    "remind me to {chore} at {time}",
    "wake me up at {time}",
    "call {person}",
    "text {person} that i am running late",
    "play {genre}",
    "play something by {artist}",
    "navigate to {city}",
    "how much is a flight to {city}",
    "order a pizza",
    "do you like {genre}",
    "are you a robot",
    "what is the meaning of life",
    "tell me something interesting",
    "flip a coin",
    "roll a dice",
    "i am bored",
    "good job",
    "never mind",
    "cancel",
    "stop",
];

pub const FILLERS: &[(&str, &[&str])] = &[
    ("time", &["7 am", "6:30 pm", "10:00pm", "8am", "noon", "5:45", "9 pm", "7:15 am", "11pm", "6 am"]),
    ("genre", &["jazz", "rock", "hip hop", "country", "classical", "r&b", "blues", "reggae", "metal", "pop"]),
    ("artist", &["taylor swift", "the beatles", "adele", "drake", "miles davis", "coldplay", "beyonce"]),
    ("city", &["seattle", "london", "paris", "new york", "tokyo", "delhi", "chicago", "berlin"]),
    ("person", &["mom", "dad", "alex", "sam", "my boss", "john", "priya", "grandma"]),
    ("chore", &["buy milk", "call the dentist", "water the plants", "pay rent", "pick up the kids", "take my pills"]),
    ("minutes", &["5", "10", "15", "20", "30", "45"]),
    ("topic", &["politics", "technology", "sports", "science", "the election", "the economy"]),
    ("source", &["bbc", "npr", "cnn", "reuters"]),
    ("team", &["the seahawks", "the lakers", "arsenal", "the yankees"]),
    ("company", &["microsoft", "apple", "tesla", "amazon"]),
    ("item", &["milk", "eggs", "paper towels", "coffee", "dog food"]),
    ("dish", &["lasagna", "pancakes", "chicken curry", "banana bread"]),
    ("language", &["french", "spanish", "hindi", "german", "japanese"]),
    ("country", &["france", "india", "japan", "brazil", "canada", "kenya"]),
    ("landmark", &["mount everest", "the eiffel tower", "the moon", "the statue of liberty"]),
    ("holiday", &["christmas", "thanksgiving", "diwali", "easter", "new year"]),
    ("number", &["two", "seven", "12", "40", "100", "3"]),
    ("word", &["serendipity", "ubiquitous", "necessary", "rhythm", "quixotic"]),
];
